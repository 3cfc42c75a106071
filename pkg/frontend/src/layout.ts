/**
 * Presentation geometry: server numbers in, pixel positions out.
 *
 * This module owns every arithmetic step between a payload and the screen
 * so the view layer can be held to a no-math rule. Nothing here computes a
 * statistic or an embedding coordinate — inputs are the server's numbers
 * and outputs are where to draw them.
 */

import type {
  BoxplotJson,
  CategoryCount,
  Coords,
  FieldSummaryJson,
  HistogramBin,
  KdePoint,
} from "./types.js";

export const CHART_WIDTH = 360;
export const CHART_HEIGHT = 120;
export const BOX_STRIP_HEIGHT = 28;
export const CATEGORY_ROW_HEIGHT = 22;
export const SCATTER_SIZE = 480;

/** Pixel values rounded to hundredths keep rendered markup stable. */
function px(value: number): number {
  return Math.round(value * 100) / 100;
}

export type Scale = (value: number) => number;

export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): Scale {
  const span = d1 - d0;
  if (span === 0) {
    const mid = (r0 + r1) / 2;
    return () => mid;
  }
  return (value) => r0 + ((value - d0) / span) * (r1 - r0);
}

// -- histogram + KDE -----------------------------------------------------------

export interface BarGeometry {
  x: number;
  y: number;
  width: number;
  height: number;
  lo: number;
  hi: number;
  count: number;
}

export interface HistogramGeometry {
  width: number;
  height: number;
  bars: BarGeometry[];
}

export function histogramLayout(
  bins: HistogramBin[],
  width: number = CHART_WIDTH,
  height: number = CHART_HEIGHT,
): HistogramGeometry {
  if (bins.length === 0) {
    return { width, height, bars: [] };
  }
  const lo = bins[0]![0];
  const hi = bins[bins.length - 1]![1];
  const xScale = linearScale(lo, hi, 0, width);
  let maxCount = 0;
  for (const [, , count] of bins) {
    if (count > maxCount) maxCount = count;
  }
  const bars = bins.map(([binLo, binHi, count]) => {
    const x0 = xScale(binLo);
    const x1 = xScale(binHi);
    const h = maxCount === 0 ? 0 : (count / maxCount) * height;
    return {
      x: px(x0),
      y: px(height - h),
      width: px(Math.max(x1 - x0, 0)),
      height: px(h),
      lo: binLo,
      hi: binHi,
      count,
    };
  });
  return { width, height, bars };
}

/**
 * KDE curve as an SVG polyline points string, sharing the histogram's
 * x-domain so the overlay lines up with the bars.
 */
export function kdePolyline(
  kde: KdePoint[],
  domainLo: number,
  domainHi: number,
  width: number = CHART_WIDTH,
  height: number = CHART_HEIGHT,
): string {
  if (kde.length === 0) return "";
  const xScale = linearScale(domainLo, domainHi, 0, width);
  let maxDensity = 0;
  for (const [, density] of kde) {
    if (density > maxDensity) maxDensity = density;
  }
  const yScale = maxDensity === 0
    ? () => height
    : linearScale(0, maxDensity, height, 0);
  return kde
    .map(([x, density]) => `${px(xScale(x))},${px(yScale(density))}`)
    .join(" ");
}

// -- box plots -------------------------------------------------------------------

export interface BoxplotGeometry {
  xWhiskerLo: number;
  xQ1: number;
  xMedian: number;
  xQ3: number;
  xWhiskerHi: number;
  yMid: number;
  yTop: number;
  yBottom: number;
  /** SVG-ready interquartile rect (views render attributes verbatim). */
  boxX: number;
  boxWidth: number;
  boxHeight: number;
}

/** The glyph spans whisker to whisker (outliers arrive as a count only). */
function boxplotSpan(box: BoxplotJson): [number, number] {
  return [box.whisker_lo, box.whisker_hi];
}

export function boxplotGlyph(
  box: BoxplotJson,
  scale: Scale,
  height: number = BOX_STRIP_HEIGHT,
): BoxplotGeometry {
  const xQ1 = px(scale(box.q1));
  const xQ3 = px(scale(box.q3));
  const yTop = px(height * 0.15);
  const yBottom = px(height * 0.85);
  return {
    xWhiskerLo: px(scale(box.whisker_lo)),
    xQ1,
    xMedian: px(scale(box.median)),
    xQ3,
    xWhiskerHi: px(scale(box.whisker_hi)),
    yMid: px(height / 2),
    yTop,
    yBottom,
    boxX: Math.min(xQ1, xQ3),
    boxWidth: px(Math.abs(xQ3 - xQ1)),
    boxHeight: px(yBottom - yTop),
  };
}

export interface GroupBoxGeometry {
  category: string;
  box: BoxplotGeometry;
}

/** Grouped box plots share a single scale so groups are comparable. */
export function groupBoxplotLayout(
  groups: [string, BoxplotJson][],
  width: number = CHART_WIDTH,
): GroupBoxGeometry[] {
  if (groups.length === 0) return [];
  let lo = Infinity;
  let hi = -Infinity;
  for (const [, box] of groups) {
    const [boxLo, boxHi] = boxplotSpan(box);
    if (boxLo < lo) lo = boxLo;
    if (boxHi > hi) hi = boxHi;
  }
  const scale = linearScale(lo, hi, 8, width - 8);
  return groups.map(([category, box]) => ({
    category,
    box: boxplotGlyph(box, scale),
  }));
}

// -- categorical bars ---------------------------------------------------------------

export interface CategoryBarGeometry {
  value: string;
  count: number;
  barY: number;
  barWidth: number;
  barHeight: number;
  textY: number;
}

export interface CategoriesGeometry {
  width: number;
  height: number;
  rows: CategoryBarGeometry[];
}

export function categoriesLayout(
  categories: CategoryCount[],
  width: number = CHART_WIDTH,
): CategoriesGeometry {
  let maxCount = 0;
  for (const [, count] of categories) {
    if (count > maxCount) maxCount = count;
  }
  const rows = categories.map(([value, count], row) => {
    const top = row * CATEGORY_ROW_HEIGHT;
    return {
      value,
      count,
      barY: px(top + 3),
      barWidth: px(maxCount === 0 ? 0 : (count / maxCount) * width),
      barHeight: px(CATEGORY_ROW_HEIGHT - 6),
      textY: px(top + CATEGORY_ROW_HEIGHT - 7),
    };
  });
  return {
    width,
    height: px(categories.length * CATEGORY_ROW_HEIGHT),
    rows,
  };
}

// -- summary bundle -----------------------------------------------------------------

export interface SummaryCharts {
  histogram: HistogramGeometry | null;
  kdePoints: string | null;
  boxplot: BoxplotGeometry | null;
  groupBoxplots: GroupBoxGeometry[] | null;
  categories: CategoriesGeometry | null;
}

/** Everything the summary view draws for one field, in one call. */
export function summaryCharts(summary: FieldSummaryJson): SummaryCharts {
  let histogram: HistogramGeometry | null = null;
  let kdePoints: string | null = null;
  let boxplot: BoxplotGeometry | null = null;
  if (summary.histogram !== null && summary.histogram.length > 0) {
    histogram = histogramLayout(summary.histogram);
    const lo = summary.histogram[0]![0];
    const hi = summary.histogram[summary.histogram.length - 1]![1];
    if (summary.kde !== null && summary.kde.length > 0) {
      kdePoints = kdePolyline(summary.kde, lo, hi);
    }
    if (summary.boxplot !== null) {
      const [spanLo, spanHi] = boxplotSpan(summary.boxplot);
      const scale = linearScale(
        Math.min(lo, spanLo), Math.max(hi, spanHi), 0, CHART_WIDTH);
      boxplot = boxplotGlyph(summary.boxplot, scale);
    }
  } else if (summary.boxplot !== null) {
    const [spanLo, spanHi] = boxplotSpan(summary.boxplot);
    boxplot = boxplotGlyph(
      summary.boxplot, linearScale(spanLo, spanHi, 8, CHART_WIDTH - 8));
  }
  return {
    histogram,
    kdePoints,
    boxplot,
    groupBoxplots: summary.group_boxplots === null
      ? null
      : groupBoxplotLayout(summary.group_boxplots),
    categories: summary.categories === null || summary.categories.length === 0
      ? null
      : categoriesLayout(summary.categories),
  };
}

// -- scatter -------------------------------------------------------------------------

export interface ScatterPoint {
  index: number;
  x: number;
  y: number;
}

export interface ScatterDomain {
  xLo: number;
  xHi: number;
  yLo: number;
  yHi: number;
}

export interface ScatterGeometry {
  width: number;
  height: number;
  points: ScatterPoint[];
  domain: ScatterDomain;
  /** Screen pixels back to embedding units (for drag targets). */
  toData(pxX: number, pxY: number): [number, number];
  /** Embedding units to screen pixels (for constraint markers). */
  toScreen(x: number, y: number): { x: number; y: number };
}

export function coordsDomain(coords: Coords): ScatterDomain {
  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const [x, y] of coords) {
    if (x < xLo) xLo = x;
    if (x > xHi) xHi = x;
    if (y < yLo) yLo = y;
    if (y > yHi) yHi = y;
  }
  if (!Number.isFinite(xLo)) return { xLo: -1, xHi: 1, yLo: -1, yHi: 1 };
  return { xLo, xHi, yLo, yHi };
}

/** Grow a sticky domain to cover new coordinates (keeps drags jitter-free). */
export function expandDomain(
  domain: ScatterDomain,
  coords: Coords,
): ScatterDomain {
  const fresh = coordsDomain(coords);
  return {
    xLo: Math.min(domain.xLo, fresh.xLo),
    xHi: Math.max(domain.xHi, fresh.xHi),
    yLo: Math.min(domain.yLo, fresh.yLo),
    yHi: Math.max(domain.yHi, fresh.yHi),
  };
}

/**
 * Project embedding coordinates into a square viewport, preserving the
 * aspect ratio (embedding axes are isotropic) and flipping y so larger
 * values draw higher.
 */
export function scatterLayout(
  coords: Coords,
  domain?: ScatterDomain,
  size: number = SCATTER_SIZE,
  pad = 16,
): ScatterGeometry {
  const box = domain ?? coordsDomain(coords);
  const spanX = box.xHi - box.xLo;
  const spanY = box.yHi - box.yLo;
  const span = Math.max(spanX, spanY, 1e-12);
  const inner = size - 2 * pad;
  const scale = inner / span;
  const cx = (box.xLo + box.xHi) / 2;
  const cy = (box.yLo + box.yHi) / 2;
  const mid = size / 2;
  const points = coords.map(([x, y], index) => ({
    index,
    x: px(mid + (x - cx) * scale),
    y: px(mid - (y - cy) * scale),
  }));
  return {
    width: size,
    height: size,
    points,
    domain: box,
    toData: (pxX, pxY) => [cx + (pxX - mid) / scale, cy - (pxY - mid) / scale],
    toScreen: (x, y) => ({
      x: px(mid + (x - cx) * scale),
      y: px(mid - (y - cy) * scale),
    }),
  };
}

// -- cluster colors ---------------------------------------------------------------------

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

/** One stable fill color per label (palette cycles past ten clusters). */
export function clusterColors(labels: number[]): string[] {
  return labels.map((label) =>
    label < 0 ? "#888888" : PALETTE[label % PALETTE.length]!);
}
