import { scatterSvg } from "../charts.js";
import type { Snapshot } from "../state.js";
import { View } from "./base.js";

/** Document projection view: 2D map of the test set (or of the selected
 * rule's subpopulation), colored by prediction correctness. Coordinates
 * come from the server as-is; selection only subsets the points. */
export class ProjectionView extends View {
  render(state: Snapshot): void {
    this.root.replaceChildren();
    const proj = state.selected ? state.selected.bundle.projection : state.overall.projection;
    if (!proj || proj.method === null) {
      this.root.appendChild(
        this.el("p", "hint", "no projection (corpus has no embeddings or coordinates)"),
      );
      return;
    }
    const caption = state.selected
      ? `subpopulation: ${proj.points.length} documents`
      : `entire test set: ${proj.points.length} documents`;
    this.root.appendChild(this.el("p", "caption", `${caption} (${proj.method})`));
    this.root.appendChild(scatterSvg(proj.points));
    const legend = this.el("p", "legend");
    legend.appendChild(this.el("span", "legend-correct", "● correct"));
    legend.appendChild(this.el("span", "legend-error", "● mispredicted"));
    this.root.appendChild(legend);
  }
}
