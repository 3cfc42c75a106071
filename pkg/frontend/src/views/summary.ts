/**
 * Data Summary view: one panel per field.
 *
 * Numeric fields get a statistics table, a histogram with a KDE overlay,
 * and a box plot strip; categorical fields get count bars, plus grouped
 * box plots when a comparison field was requested. Every displayed number
 * is the server's payload value verbatim — geometry comes precomputed from
 * the layout module and this file performs no arithmetic.
 */

import type { BoxplotJson, FieldSummaryJson } from "../types.js";
import type {
  BoxplotGeometry,
  CategoriesGeometry,
  HistogramGeometry,
  SummaryCharts,
} from "../layout.js";
import { BOX_STRIP_HEIGHT, CHART_WIDTH, summaryCharts } from "../layout.js";
import { escapeHtml, show } from "./format.js";

export function renderSummary(summaries: FieldSummaryJson[]): string {
  if (summaries.length === 0) {
    return `<div class="summary-view summary-empty">No fields selected.</div>`;
  }
  const panels = summaries.map(renderFieldPanel).join("");
  return `<div class="summary-view">${panels}</div>`;
}

export function renderFieldPanel(summary: FieldSummaryJson): string {
  const name = escapeHtml(summary.field);
  if (summary.count === 0) {
    return `<section class="field-panel empty-state" data-field="${name}">
<h3>${name}</h3>
<p class="placeholder">no data</p>
<p class="counts">count ${show(summary.count)} · missing ${show(summary.missing)}</p>
</section>`;
  }
  const charts = summaryCharts(summary);
  const body = summary.kind === "numeric"
    ? numericBody(summary, charts)
    : categoricalBody(summary, charts);
  return `<section class="field-panel" data-field="${name}" data-kind="${summary.kind}">
<h3>${name}</h3>
${body}
</section>`;
}

function numericBody(summary: FieldSummaryJson, charts: SummaryCharts): string {
  const stdLabel = summary.std_kind === null
    ? "std"
    : `std (${escapeHtml(summary.std_kind)})`;
  const rows = [
    statRow("count", show(summary.count)),
    statRow("missing", show(summary.missing)),
    statRow("min", show(summary.min)),
    statRow("max", show(summary.max)),
    statRow("mean", show(summary.mean)),
    statRow(stdLabel, show(summary.std)),
    statRow("q1", show(summary.q1)),
    statRow("median", show(summary.median)),
    statRow("q3", show(summary.q3)),
  ].join("");
  return `<table class="stats"><tbody>${rows}</tbody></table>
${charts.histogram === null ? "" : histogramSvg(charts.histogram, charts.kdePoints)}
${charts.boxplot === null ? "" : boxStripSvg(charts.boxplot, summary.boxplot)}
${charts.groupBoxplots === null ? "" : groupBoxplotsHtml(charts, summary)}`;
}

function categoricalBody(
  summary: FieldSummaryJson,
  charts: SummaryCharts,
): string {
  const counts = `<p class="counts">count ${show(summary.count)} · missing ${show(summary.missing)}</p>`;
  const bars = charts.categories === null
    ? `<p class="placeholder">no data</p>`
    : categoriesSvg(charts.categories);
  const grouped = charts.groupBoxplots === null
    ? ""
    : groupBoxplotsHtml(charts, summary);
  return `${counts}${bars}${grouped}`;
}

function statRow(label: string, value: string): string {
  return `<tr><th>${label}</th><td class="stat">${value}</td></tr>`;
}

function histogramSvg(
  geometry: HistogramGeometry,
  kdePoints: string | null,
): string {
  const bars = geometry.bars.map((bar) =>
    `<rect class="bar" x="${bar.x}" y="${bar.y}" width="${bar.width}" height="${bar.height}" data-count="${bar.count}"><title>[${bar.lo}, ${bar.hi}): ${bar.count}</title></rect>`,
  ).join("");
  const kde = kdePoints === null
    ? ""
    : `<polyline class="kde" points="${kdePoints}" fill="none"/>`;
  return `<svg class="histogram" viewBox="0 0 ${geometry.width} ${geometry.height}" role="img">${bars}${kde}</svg>`;
}

function boxGlyph(
  geometry: BoxplotGeometry,
  box: BoxplotJson,
): string {
  // Outliers arrive as a count, not values: annotate past the high whisker.
  const outliers = box.outliers === 0
    ? ""
    : `<text class="outlier-count" x="${geometry.xWhiskerHi}" y="${geometry.yTop}" dx="4">${show(box.outliers)} out</text>`;
  return `<g class="box-glyph" data-median="${box.median}" data-q1="${box.q1}" data-q3="${box.q3}" data-whisker-lo="${box.whisker_lo}" data-whisker-hi="${box.whisker_hi}" data-outliers="${box.outliers}">
<line class="whisker" x1="${geometry.xWhiskerLo}" x2="${geometry.xQ1}" y1="${geometry.yMid}" y2="${geometry.yMid}"/>
<line class="whisker" x1="${geometry.xQ3}" x2="${geometry.xWhiskerHi}" y1="${geometry.yMid}" y2="${geometry.yMid}"/>
<line class="cap" x1="${geometry.xWhiskerLo}" x2="${geometry.xWhiskerLo}" y1="${geometry.yTop}" y2="${geometry.yBottom}"/>
<line class="cap" x1="${geometry.xWhiskerHi}" x2="${geometry.xWhiskerHi}" y1="${geometry.yTop}" y2="${geometry.yBottom}"/>
<rect class="iqr" x="${geometry.boxX}" y="${geometry.yTop}" width="${geometry.boxWidth}" height="${geometry.boxHeight}"><title>q1 ${box.q1} · median ${box.median} · q3 ${box.q3} · outliers ${box.outliers}</title></rect>
<line class="median" x1="${geometry.xMedian}" x2="${geometry.xMedian}" y1="${geometry.yTop}" y2="${geometry.yBottom}"/>
${outliers}
</g>`;
}

function boxStripSvg(
  geometry: BoxplotGeometry,
  box: BoxplotJson | null,
): string {
  if (box === null) return "";
  return `<svg class="box-strip" viewBox="0 0 ${CHART_WIDTH} ${BOX_STRIP_HEIGHT}" role="img">${boxGlyph(geometry, box)}</svg>`;
}

function groupBoxplotsHtml(
  charts: SummaryCharts,
  summary: FieldSummaryJson,
): string {
  if (charts.groupBoxplots === null || summary.group_boxplots === null) {
    return "";
  }
  const source = new Map(summary.group_boxplots);
  const strips = charts.groupBoxplots.map((group) => {
    const box = source.get(group.category);
    if (box === undefined) return "";
    return `<div class="group-box" data-category="${escapeHtml(group.category)}">
<span class="group-label">${escapeHtml(group.category)}</span>
<svg class="box-strip" viewBox="0 0 ${CHART_WIDTH} ${BOX_STRIP_HEIGHT}" role="img">${boxGlyph(group.box, box)}</svg>
</div>`;
  }).join("");
  return `<div class="group-boxplots">${strips}</div>`;
}

function categoriesSvg(geometry: CategoriesGeometry): string {
  const rows = geometry.rows.map((row) =>
    `<g class="category-row" data-value="${escapeHtml(row.value)}" data-count="${row.count}">
<rect class="bar" x="0" y="${row.barY}" width="${row.barWidth}" height="${row.barHeight}"/>
<text class="label" x="4" y="${row.textY}">${escapeHtml(row.value)}: ${row.count}</text>
</g>`,
  ).join("");
  return `<svg class="categories" viewBox="0 0 ${geometry.width} ${geometry.height}" role="img">${rows}</svg>`;
}
