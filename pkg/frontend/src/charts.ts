/** Hand-rolled SVG fragments: small enough that a chart library would be
 * more code than the charts. */

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElement(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

/** Histogram of rule error rates with 20 fixed bins over [0, 1]. */
export function histogramSvg(counts: number[], width = 260, height = 60): SVGElement {
  const svg = svgElement("svg", { width, height, class: "histogram" });
  const maxCount = Math.max(1, ...counts);
  const barW = width / counts.length;
  counts.forEach((c, i) => {
    const h = (c / maxCount) * (height - 4);
    svg.appendChild(
      svgElement("rect", {
        x: i * barW + 1,
        y: height - h,
        width: barW - 2,
        height: h,
        class: "hist-bar",
      }),
    );
  });
  return svg;
}

/** Mirrored attribution chart: cnt_pos bars grow up, cnt_neg bars grow down
 * in the same column. Tokens arrive pre-ordered by the API. */
export function attributionSvg(
  columns: { token: string; cnt_pos: number; cnt_neg: number }[],
  width = 560,
  height = 160,
): SVGElement {
  const svg = svgElement("svg", { width, height, class: "attribution-chart" });
  const shown = columns.slice(0, 24);
  if (shown.length === 0) return svg;
  const mid = height * 0.45;
  const maxV = Math.max(1, ...shown.map((c) => Math.max(c.cnt_pos, c.cnt_neg)));
  const colW = width / shown.length;
  const scale = (v: number) => (v / maxV) * (mid - 14);
  shown.forEach((col, i) => {
    const x = i * colW + 2;
    const posH = scale(col.cnt_pos);
    const negH = scale(col.cnt_neg);
    const up = svgElement("rect", {
      x, y: mid - posH, width: colW - 4, height: posH, class: "bar-pos",
      "data-token": col.token,
    });
    const down = svgElement("rect", {
      x, y: mid, width: colW - 4, height: negH, class: "bar-neg",
      "data-token": col.token,
    });
    const label = svgElement("text", {
      x: x + (colW - 4) / 2, y: height - 4, class: "bar-label",
      "text-anchor": "middle",
    });
    label.textContent = col.token.length > 8 ? col.token.slice(0, 7) + "…" : col.token;
    svg.append(up, down, label);
  });
  svg.appendChild(svgElement("line", { x1: 0, y1: mid, x2: width, y2: mid, class: "axis" }));
  return svg;
}

/** Scatter of projected documents, colored by correctness. */
export function scatterSvg(
  points: { id: string; x: number; y: number; correct: boolean }[],
  width = 420,
  height = 300,
): SVGElement {
  const svg = svgElement("svg", { width, height, class: "projection-plot" });
  if (points.length === 0) return svg;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x: number) => (x1 === x0 ? width / 2 : 8 + ((x - x0) / (x1 - x0)) * (width - 16));
  const sy = (y: number) => (y1 === y0 ? height / 2 : height - 8 - ((y - y0) / (y1 - y0)) * (height - 16));
  for (const p of points) {
    svg.appendChild(
      svgElement("circle", {
        cx: sx(p.x),
        cy: sy(p.y),
        r: 2.5,
        class: p.correct ? "pt-correct" : "pt-error",
        "data-id": p.id,
      }),
    );
  }
  return svg;
}

/** Error-rate dot with CI whiskers on a 0..1 axis, for concept cards. */
export function whiskerSvg(
  rate: number | null,
  lo: number | null,
  hi: number | null,
  baseline: number | null,
  width = 200,
  height = 26,
): SVGElement {
  const svg = svgElement("svg", { width, height, class: "ci-whisker" });
  const x = (v: number) => 4 + v * (width - 8);
  const mid = height / 2;
  svg.appendChild(svgElement("line", { x1: 4, y1: mid, x2: width - 4, y2: mid, class: "axis" }));
  if (baseline !== null) {
    svg.appendChild(
      svgElement("line", { x1: x(baseline), y1: 3, x2: x(baseline), y2: height - 3, class: "baseline-mark" }),
    );
  }
  if (lo !== null && hi !== null) {
    svg.appendChild(svgElement("line", { x1: x(lo), y1: mid, x2: x(hi), y2: mid, class: "ci-range" }));
    for (const v of [lo, hi]) {
      svg.appendChild(svgElement("line", { x1: x(v), y1: mid - 5, x2: x(v), y2: mid + 5, class: "ci-range" }));
    }
  }
  if (rate !== null) {
    svg.appendChild(svgElement("circle", { cx: x(rate), cy: mid, r: 3.5, class: "rate-dot" }));
  }
  return svg;
}
