import { pct, pvalue, ruleLabel } from "../format.js";
import type { Snapshot } from "../state.js";
import type { RuleJson } from "../types.js";
import { View } from "./base.js";

/** Model performance view: accuracy, baseline error rate, and the
 * highest-error single-condition tokens and high-level buckets. */
export class OverviewView extends View {
  render(state: Snapshot): void {
    this.root.replaceChildren();
    const s = state.summary;
    if (!s) {
      this.root.appendChild(this.el("p", "hint", "loading…"));
      return;
    }
    const head = this.el("div", "metric-row");
    const metrics: [string, string][] = [
      ["accuracy", pct(s.accuracy)],
      ["baseline error rate", pct(s.baseline_error_rate)],
      ["test docs", String(s.n_test)],
      ["train docs", String(s.n_train)],
      ["rules", s.n_rules === null ? "…" : String(s.n_rules)],
    ];
    for (const [label, value] of metrics) {
      const box = this.el("div", "metric");
      box.appendChild(this.el("div", "metric-value", value));
      box.appendChild(this.el("div", "metric-label", label));
      head.appendChild(box);
    }
    this.root.appendChild(head);

    const lists = this.el("div", "top-lists");
    lists.appendChild(this.topList("Top 10 Tokens/Phrases", s.top_tokens));
    lists.appendChild(this.topList("Top 5 High-Level Features", s.top_high_level));
    this.root.appendChild(lists);
  }

  private topList(title: string, rules: RuleJson[]): HTMLElement {
    const box = this.el("div", "top-list");
    box.appendChild(this.el("h3", undefined, title));
    const ul = this.el("ul");
    for (const r of rules) {
      const li = this.el("li");
      li.appendChild(this.el("span", "top-label", ruleLabel(r.conditions)));
      li.appendChild(this.el("span", "top-rate", pct(r.error_rate)));
      li.title = `support ${r.support_count}, p=${pvalue(r.p_value)}`;
      ul.appendChild(li);
    }
    if (rules.length === 0) ul.appendChild(this.el("li", "hint", "none yet"));
    box.appendChild(ul);
    return box;
  }
}
