import { whiskerSvg } from "../charts.js";
import { pct, pvalue } from "../format.js";
import type { Snapshot } from "../state.js";
import type { ConceptJson } from "../types.js";
import { View } from "./base.js";

/** Concept construction view: create or edit named token sets, each card
 * showing its subpopulation size, error rate and CI whiskers; compare mode
 * puts cards side by side with the API's pairwise CI-overlap flags. */
export class ConceptsView extends View {
  private editing: number | null = null;

  render(state: Snapshot): void {
    this.root.replaceChildren();
    this.root.appendChild(this.creationForm(state));

    const cards = this.el("div", "concept-cards");
    for (const concept of state.concepts) {
      cards.appendChild(this.card(concept, state));
    }
    this.root.appendChild(cards);

    if (state.concepts.length >= 2) {
      const compareBtn = this.el("button", "compare-btn", "Compare all");
      compareBtn.addEventListener("click", () =>
        void this.store.compareConcepts(state.concepts.map((c) => c.id)),
      );
      this.root.appendChild(compareBtn);
    }

    if (state.compare) {
      this.root.appendChild(this.compareBox(state));
    }
  }

  private creationForm(state: Snapshot): HTMLElement {
    const form = this.el("div", "concept-form");
    const editing = this.editing !== null
      ? state.concepts.find((c) => c.id === this.editing) ?? null
      : null;
    const name = this.el("input", "concept-name") as HTMLInputElement;
    name.placeholder = "concept name";
    const tokens = this.el("input", "concept-tokens") as HTMLInputElement;
    tokens.placeholder = "tokens, comma separated (she, her, hers)";
    if (editing) {
      name.value = editing.name;
      tokens.value = editing.tokens.join(", ");
    }
    const submit = this.el(
      "button",
      "concept-submit",
      editing ? "Update concept" : "Add concept",
    ) as HTMLButtonElement;
    const validate = () => {
      const toks = tokens.value.split(",").map((t) => t.trim()).filter(Boolean);
      submit.disabled = name.value.trim() === "" || toks.length === 0;
    };
    validate();
    name.addEventListener("input", validate);
    tokens.addEventListener("input", validate);
    const errBox = this.el("span", "inline-error", "");
    submit.addEventListener("click", () => {
      const toks = tokens.value.split(",").map((t) => t.trim()).filter(Boolean);
      if (name.value.trim() === "" || toks.length === 0) return;
      void this.store
        .submitConcept(name.value.trim(), toks, this.editing ?? undefined)
        .then(() => {
          this.editing = null;
        })
        .catch((err) => {
          errBox.textContent = err instanceof Error ? err.message : String(err);
        });
    });
    form.append(name, tokens, submit, errBox);
    return form;
  }

  private card(concept: ConceptJson, state: Snapshot): HTMLElement {
    const card = this.el("div", "concept-card");
    card.dataset.conceptId = String(concept.id);
    card.appendChild(this.el("h4", "concept-title", concept.name));
    card.appendChild(this.el("p", "concept-token-list", concept.tokens.join(", ")));
    const s = concept.summary;
    if (s) {
      card.appendChild(
        this.el(
          "p",
          "concept-metrics",
          s.size === 0
            ? "no matching documents"
            : `${s.size} docs, error rate ${pct(s.error_rate)}, p=${pvalue(s.p_value)}`,
        ),
      );
      card.appendChild(
        whiskerSvg(s.error_rate, s.ci_low, s.ci_high, state.summary?.baseline_error_rate ?? null),
      );
    }
    const edit = this.el("button", "concept-edit", "edit");
    edit.addEventListener("click", () => {
      this.editing = concept.id;
      this.render(state);
    });
    const use = this.el("button", "concept-use", "use in rule");
    use.addEventListener("click", () =>
      this.store.addDraftCondition({ kind: "concept", concept_id: concept.id }),
    );
    const row = this.el("div", "card-actions");
    row.append(edit, use);
    card.appendChild(row);
    return card;
  }

  private compareBox(state: Snapshot): HTMLElement {
    const box = this.el("div", "compare-box");
    box.appendChild(this.el("h4", undefined, "Concept comparison"));
    const row = this.el("div", "compare-cards");
    for (const concept of state.compare!.concepts) {
      const mini = this.el("div", "compare-card");
      mini.dataset.conceptId = String(concept.id);
      mini.appendChild(this.el("h5", undefined, concept.name));
      const s = concept.summary;
      if (s) {
        mini.appendChild(this.el("p", undefined, `${s.size} docs, ${pct(s.error_rate)}`));
        mini.appendChild(
          whiskerSvg(s.error_rate, s.ci_low, s.ci_high, state.summary?.baseline_error_rate ?? null),
        );
      }
      row.appendChild(mini);
    }
    box.appendChild(row);

    const flags = this.el("ul", "overlap-flags");
    const name = (id: number) =>
      state.compare!.concepts.find((c) => c.id === id)?.name ?? `#${id}`;
    for (const o of state.compare!.overlaps) {
      const li = this.el(
        "li",
        o.ci_overlap === null ? "overlap-unknown" : o.ci_overlap ? "overlap-yes" : "overlap-no",
        o.ci_overlap === null
          ? `${name(o.a)} vs ${name(o.b)}: undefined`
          : o.ci_overlap
            ? `${name(o.a)} vs ${name(o.b)}: CIs overlap (no significant difference)`
            : `${name(o.a)} vs ${name(o.b)}: CIs disjoint`,
      );
      li.dataset.a = String(o.a);
      li.dataset.b = String(o.b);
      flags.appendChild(li);
    }
    box.appendChild(flags);
    return box;
  }
}
