"""Static text/HTML reports over an ingested-and-discovered workspace."""

from __future__ import annotations

import html

from errlens.analysis import RuleEvaluator
from errlens.rules import Rule, RuleSet


def _fmt(x, digits=4):
    if x is None:
        return "-"
    return f"{x:.{digits}f}"


def _rule_row(rule: Rule) -> tuple[str, ...]:
    m = rule.metrics
    return (
        rule.render(),
        str(m.support_count),
        _fmt(m.support_fraction, 3),
        _fmt(m.error_rate, 3),
        f"{m.p_value:.2e}" if m.p_value is not None else "-",
        f"[{_fmt(m.ci_low, 3)}, {_fmt(m.ci_high, 3)}]",
    )


_HEADERS = ("rule", "support", "fraction", "error rate", "p-value", "95% CI")


def render_text(evaluator: RuleEvaluator, ruleset: RuleSet, max_rules: int = 50) -> str:
    ov = evaluator.overview(ruleset)
    lines = [
        "error analysis report",
        "=" * 60,
        f"test documents:      {ov.n_test}",
        f"train documents:     {ov.n_train}",
        f"classes:             {', '.join(ov.classes)}",
        f"accuracy:            {ov.accuracy:.4f}",
        f"baseline error rate: {ov.baseline_error_rate:.4f}",
        f"discovered rules:    {len(ruleset.rules)}",
        "",
    ]
    rows = [_rule_row(r) for r in ruleset.rules[:max_rules]]
    if rows:
        widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(_HEADERS)]
        lines.append("  ".join(h.ljust(w) for h, w in zip(_HEADERS, widths)))
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        if len(ruleset.rules) > max_rules:
            lines.append(f"... {len(ruleset.rules) - max_rules} more rules")
    else:
        lines.append("no rules met the support/error-rate thresholds")
    return "\n".join(lines) + "\n"


def render_html(evaluator: RuleEvaluator, ruleset: RuleSet, max_rules: int = 200) -> str:
    ov = evaluator.overview(ruleset)
    esc = html.escape
    rows = []
    for rule in ruleset.rules[:max_rules]:
        cells = "".join(f"<td>{esc(c)}</td>" for c in _rule_row(rule))
        rows.append(f"<tr>{cells}</tr>")
    header = "".join(f"<th>{esc(h)}</th>" for h in _HEADERS)
    return f"""<!doctype html>
<html><head><meta charset="utf-8"><title>error analysis report</title>
<style>
body {{ font-family: system-ui, sans-serif; margin: 2rem; }}
table {{ border-collapse: collapse; }}
th, td {{ border: 1px solid #ccc; padding: 4px 10px; text-align: left; }}
th {{ background: #f0f0f0; }}
dl {{ display: grid; grid-template-columns: max-content auto; gap: 2px 12px; }}
dt {{ font-weight: 600; }}
</style></head>
<body>
<h1>Error analysis report</h1>
<dl>
<dt>test documents</dt><dd>{ov.n_test}</dd>
<dt>train documents</dt><dd>{ov.n_train}</dd>
<dt>classes</dt><dd>{esc(", ".join(ov.classes))}</dd>
<dt>accuracy</dt><dd>{ov.accuracy:.4f}</dd>
<dt>baseline error rate</dt><dd>{ov.baseline_error_rate:.4f}</dd>
<dt>discovered rules</dt><dd>{len(ruleset.rules)}</dd>
</dl>
<h2>Rules</h2>
<table><thead><tr>{header}</tr></thead><tbody>
{chr(10).join(rows)}
</tbody></table>
</body></html>
"""
