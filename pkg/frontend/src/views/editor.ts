import { ci, conditionLabel, pct, pvalue } from "../format.js";
import type { Snapshot } from "../state.js";
import type { ConditionJson } from "../types.js";
import { View } from "./base.js";

/** Rule editing view: the selected rule's conditions appear here as chips;
 * conditions can be added (token, concept, high-level) or removed, Reset
 * clears everything, and Evaluate posts the draft for a full bundle. */
export class RuleEditorView extends View {
  render(state: Snapshot): void {
    this.root.replaceChildren();

    const chips = this.el("div", "draft-chips");
    state.draft.forEach((cond, i) => {
      const chip = this.el("span", "chip", conditionLabel(cond));
      const x = this.el("button", "chip-remove", "×");
      x.setAttribute("aria-label", `remove ${conditionLabel(cond)}`);
      x.addEventListener("click", () => this.store.removeDraftCondition(i));
      chip.appendChild(x);
      chips.appendChild(chip);
    });
    if (state.draft.length === 0) chips.appendChild(this.el("span", "hint", "no conditions"));
    this.root.appendChild(chips);

    this.root.appendChild(this.addTokenRow());
    this.root.appendChild(this.addConceptRow(state));
    this.root.appendChild(this.addHighLevelRow(state));

    const actions = this.el("div", "editor-actions");
    const evalBtn = this.el("button", "evaluate-btn", "Evaluate") as HTMLButtonElement;
    evalBtn.disabled = !this.store.draftSubmittable() || state.busy;
    evalBtn.addEventListener("click", () => void this.store.evaluateDraft());
    const resetBtn = this.el("button", "reset-btn", "Reset");
    resetBtn.addEventListener("click", () => this.store.resetDraft());
    actions.append(evalBtn, resetBtn);
    this.root.appendChild(actions);

    if (state.selected && state.selected.ruleId === null) {
      const m = state.selected.bundle.rule;
      this.root.appendChild(
        this.el(
          "p",
          "draft-metrics",
          m.support_count === 0
            ? "no matching documents"
            : `n=${m.support_count} error rate ${pct(m.error_rate)} ` +
              `p=${pvalue(m.p_value)} CI ${ci(m.ci_low, m.ci_high)}`,
        ),
      );
    }
    if (state.error) {
      this.root.appendChild(this.el("p", "error-banner", state.error));
    }
  }

  private addTokenRow(): HTMLElement {
    const row = this.el("div", "add-row");
    const input = this.el("input", "token-input") as HTMLInputElement;
    input.placeholder = "token or phrase (1-3 words)";
    const btn = this.el("button", "add-token", "+ token");
    btn.addEventListener("click", () => {
      const value = input.value.trim();
      if (!value || value.split(/\s+/).length > 3) return;
      this.store.addDraftCondition({ kind: "token", token: value });
      input.value = "";
    });
    row.append(input, btn);
    return row;
  }

  private addConceptRow(state: Snapshot): HTMLElement {
    const row = this.el("div", "add-row");
    const select = this.el("select", "concept-select") as HTMLSelectElement;
    for (const c of state.concepts) {
      const opt = this.el("option", undefined, c.name) as HTMLOptionElement;
      opt.value = String(c.id);
      select.appendChild(opt);
    }
    const btn = this.el("button", "add-concept", "+ concept") as HTMLButtonElement;
    btn.disabled = state.concepts.length === 0;
    btn.addEventListener("click", () => {
      if (select.value === "") return;
      this.store.addDraftCondition({ kind: "concept", concept_id: Number(select.value) });
    });
    row.append(select, btn);
    return row;
  }

  private addHighLevelRow(state: Snapshot): HTMLElement {
    const row = this.el("div", "add-row");
    const featSel = this.el("select", "feature-select") as HTMLSelectElement;
    for (const f of state.summary?.high_level_features ?? []) {
      const opt = this.el("option", undefined, f.name) as HTMLOptionElement;
      opt.value = f.name;
      featSel.appendChild(opt);
    }
    const bucketSel = this.el("select", "bucket-select") as HTMLSelectElement;
    for (const b of ["Low", "Medium", "High"]) {
      const opt = this.el("option", undefined, b) as HTMLOptionElement;
      opt.value = b;
      bucketSel.appendChild(opt);
    }
    const btn = this.el("button", "add-high-level", "+ high-level") as HTMLButtonElement;
    btn.disabled = (state.summary?.high_level_features ?? []).length === 0;
    btn.addEventListener("click", () => {
      if (featSel.value === "") return;
      this.store.addDraftCondition({
        kind: "high_level",
        feature: featSel.value,
        bucket: bucketSel.value as ConditionJson["bucket"],
      });
    });
    row.append(featSel, bucketSel, btn);
    return row;
  }
}
