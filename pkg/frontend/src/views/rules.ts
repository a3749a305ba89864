import { histogramSvg } from "../charts.js";
import { ci, pct, pvalue, ruleLabel } from "../format.js";
import type { Snapshot } from "../state.js";
import { View } from "./base.js";

/** Rule discovery view: error-rate histogram with a slider filter, a
 * condition-count filter, sort order, and the rule list itself. */
export class RuleListView extends View {
  render(state: Snapshot): void {
    this.root.replaceChildren();
    const page = state.rulesPage;
    if (!page) {
      this.root.appendChild(
        this.el("p", "hint", `discovery ${state.summary?.discovery_state ?? "pending"}…`),
      );
      return;
    }

    const controls = this.el("div", "rule-controls");
    controls.appendChild(histogramSvg(page.histogram.counts));

    const slider = this.el("input") as HTMLInputElement;
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.05";
    slider.value = String(state.filters.minErrorRate);
    slider.className = "rate-slider";
    slider.setAttribute("aria-label", "minimum error rate");
    slider.addEventListener("input", () => {
      this.store.setFilters({ minErrorRate: Number(slider.value) });
    });
    const sliderWrap = this.el("label", "control");
    sliderWrap.append(`min error rate ${pct(state.filters.minErrorRate, 0)}`, slider);
    controls.appendChild(sliderWrap);

    const condSel = this.el("select") as HTMLSelectElement;
    condSel.className = "conditions-filter";
    for (const [value, label] of [
      ["", "any # conditions"],
      ["1", "1 condition"],
      ["2", "≤ 2 conditions"],
      ["3", "≤ 3 conditions"],
    ]) {
      const opt = this.el("option", undefined, label) as HTMLOptionElement;
      opt.value = value;
      condSel.appendChild(opt);
    }
    condSel.value = state.filters.maxConditions === null ? "" : String(state.filters.maxConditions);
    condSel.addEventListener("change", () => {
      this.store.setFilters({ maxConditions: condSel.value === "" ? null : Number(condSel.value) });
    });
    controls.appendChild(condSel);

    const sortSel = this.el("select") as HTMLSelectElement;
    sortSel.className = "sort-select";
    for (const [value, label] of [
      ["error_rate", "sort by error rate"],
      ["support", "sort by support"],
    ]) {
      const opt = this.el("option", undefined, label) as HTMLOptionElement;
      opt.value = value;
      sortSel.appendChild(opt);
    }
    sortSel.value = state.filters.sort;
    sortSel.addEventListener("change", () => {
      this.store.setFilters({ sort: sortSel.value as "error_rate" | "support" });
    });
    controls.appendChild(sortSel);

    const metricToggle = this.el(
      "button",
      "metric-toggle",
      state.metricDisplay === "p_value" ? "show 95% CI" : "show p-value",
    );
    metricToggle.addEventListener("click", () => this.store.toggleMetricDisplay());
    controls.appendChild(metricToggle);

    this.root.appendChild(controls);

    const list = this.el("ul", "rule-list");
    for (const rule of this.store.visibleRules()) {
      const li = this.el("li", "rule-item");
      li.dataset.ruleId = String(rule.id);
      li.dataset.nConditions = String(rule.n_conditions);
      if (state.selected && state.selected.ruleId === rule.id) li.classList.add("selected");

      li.appendChild(this.el("span", "rule-support", `n=${rule.support_count}`));
      li.appendChild(this.el("span", "rule-text", ruleLabel(rule.conditions)));
      li.appendChild(this.el("span", "rule-rate", pct(rule.error_rate)));
      li.appendChild(
        this.el(
          "span",
          "rule-metric",
          state.metricDisplay === "p_value"
            ? `p=${pvalue(rule.p_value)}`
            : ci(rule.ci_low, rule.ci_high),
        ),
      );
      li.addEventListener("click", () => {
        if (state.selected && state.selected.ruleId === rule.id) {
          this.store.deselect();
        } else if (rule.id !== null) {
          void this.store.selectRule(rule.id);
        }
      });
      list.appendChild(li);
    }
    this.root.appendChild(list);
  }
}
