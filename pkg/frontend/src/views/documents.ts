import { attributionSvg } from "../charts.js";
import type { Snapshot } from "../state.js";
import type { DocumentJson } from "../types.js";
import { View } from "./base.js";

/** Document detail view: the aggregated attribution bar chart for the
 * subpopulation (cnt_pos up, cnt_neg down, columns in API order) above the
 * matching documents, mispredicted first, rule tokens highlighted. */
export class DocumentsView extends View {
  private cls: string | null = null;

  render(state: Snapshot): void {
    this.root.replaceChildren();

    if (state.selected) {
      const attributions = state.selected.bundle.attributions;
      const classes = Object.keys(attributions);
      if (this.cls === null || !classes.includes(this.cls)) this.cls = classes[0] ?? null;

      const chartBox = this.el("div", "attribution-box");
      const classBar = this.el("div", "class-tabs");
      for (const cls of classes) {
        const btn = this.el("button", "tab", cls);
        if (cls === this.cls) btn.classList.add("active");
        btn.addEventListener("click", () => {
          this.cls = cls;
          this.render(state);
        });
        classBar.appendChild(btn);
      }
      chartBox.appendChild(classBar);
      if (this.cls !== null) {
        chartBox.appendChild(attributionSvg(attributions[this.cls] ?? []));
      }
      this.root.appendChild(chartBox);
    } else {
      this.root.appendChild(
        this.el("p", "hint", "select or create a rule to see aggregated attributions"),
      );
    }

    const docsPage = state.selected ? state.selected.bundle.documents : state.overall.documents;
    if (!docsPage) return;
    const list = this.el("div", "doc-list");
    for (const doc of docsPage.documents) {
      list.appendChild(this.renderDoc(doc));
    }
    if (docsPage.total > docsPage.documents.length) {
      list.appendChild(
        this.el("p", "hint", `showing ${docsPage.documents.length} of ${docsPage.total} documents`),
      );
    }
    this.root.appendChild(list);
  }

  private renderDoc(doc: DocumentJson): HTMLElement {
    const box = this.el("div", doc.correct ? "doc doc-correct" : "doc doc-error");
    box.dataset.docId = doc.id;
    const head = this.el("div", "doc-head");
    head.appendChild(this.el("span", "doc-id", doc.id));
    head.appendChild(this.el("span", "doc-label", `label: ${doc.label}`));
    head.appendChild(this.el("span", "doc-pred", `predicted: ${doc.prediction}`));
    box.appendChild(head);
    doc.texts.forEach((text, part) => {
      box.appendChild(this.highlighted(text, part, doc.highlights));
    });
    return box;
  }

  /** Wrap the rule-token character spans of one text part in <mark>. */
  private highlighted(text: string, part: number, spans: [number, number, number][]): HTMLElement {
    const p = this.el("p", "doc-text");
    const own = spans
      .filter(([sp]) => sp === part)
      .map(([, start, end]) => [start, end] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    let cursor = 0;
    for (const [start, end] of own) {
      if (start < cursor) continue; // overlapping span already covered
      p.append(text.slice(cursor, start));
      const mark = this.el("mark", "rule-token", text.slice(start, end));
      p.appendChild(mark);
      cursor = end;
    }
    p.append(text.slice(cursor));
    return p;
  }
}
