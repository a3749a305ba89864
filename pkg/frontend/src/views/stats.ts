import { pct } from "../format.js";
import type { Snapshot } from "../state.js";
import type { StatsJson } from "../types.js";
import { View } from "./base.js";

/** Statistics view with Overall and Subpopulation tabs. The subpopulation
 * tab activates when a rule is selected and adds the training-set token
 * distribution for the rule's tokens. */
export class StatsView extends View {
  render(state: Snapshot): void {
    this.root.replaceChildren();
    const subpop = state.selected?.bundle.stats ?? null;
    const overall = state.overall.stats;

    const tabs = this.el("div", "tabs");
    const overallTab = this.el("button", "tab", "Overall stat.");
    const subTab = this.el("button", "tab", "Subpopulation stat.");
    (subpop ? subTab : overallTab).classList.add("active");
    if (!subpop) subTab.disabled = true;
    tabs.append(overallTab, subTab);
    this.root.appendChild(tabs);

    const active = subpop ?? overall;
    if (!active) {
      this.root.appendChild(this.el("p", "hint", "loading…"));
      return;
    }
    this.root.appendChild(this.renderStats(active, subpop !== null));
  }

  private renderStats(stats: StatsJson, isSubpop: boolean): HTMLElement {
    const box = this.el("div", "stats-body");
    box.appendChild(
      this.el(
        "p",
        "stats-headline",
        `${stats.size} documents, ${stats.error_count} errors (${pct(stats.error_rate)})`,
      ),
    );
    box.appendChild(this.countTable("errors by label", stats.errors_by_label));
    box.appendChild(this.countTable("errors by prediction", stats.errors_by_prediction));
    for (const [feature, buckets] of Object.entries(stats.errors_by_bucket)) {
      box.appendChild(this.countTable(`errors by ${feature}`, buckets));
    }
    if (isSubpop) {
      const trainBox = this.el("div", "train-freq");
      trainBox.appendChild(
        this.el(
          "p",
          "stats-headline",
          `matches ${stats.train_match_count} training / ${stats.test_match_count} test documents`,
        ),
      );
      for (const [token, byLabel] of Object.entries(stats.train_token_frequency)) {
        trainBox.appendChild(this.countTable(`"${token}" in training set by label`, byLabel));
      }
      box.appendChild(trainBox);
    }
    return box;
  }

  private countTable(title: string, counts: Record<string, number>): HTMLElement {
    const wrap = this.el("div", "count-table");
    wrap.appendChild(this.el("h4", undefined, title));
    const entries = Object.entries(counts);
    if (entries.length === 0) {
      wrap.appendChild(this.el("p", "hint", "none"));
      return wrap;
    }
    const max = Math.max(...entries.map(([, v]) => v), 1);
    for (const [key, value] of entries) {
      const row = this.el("div", "count-row");
      row.appendChild(this.el("span", "count-key", key));
      const bar = this.el("span", "count-bar");
      bar.style.width = `${(value / max) * 120}px`;
      row.appendChild(bar);
      row.appendChild(this.el("span", "count-value", String(value)));
      wrap.appendChild(row);
    }
    return wrap;
  }
}
