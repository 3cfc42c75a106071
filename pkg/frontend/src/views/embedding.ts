/**
 * Interactive Embedding view: the scatter the user steers.
 *
 * Control points, links, and strength sliders render from the server's
 * constraint echo; quality metrics render verbatim. Dragging is only
 * meaningful for ckpca embeddings — static methods get an explanatory
 * banner instead of drag affordances, mirroring the server's not_ckpca
 * error. All geometry arrives precomputed; this file does no arithmetic.
 */

import type { ConstraintsJson, QualityJson } from "../types.js";
import type { ScatterGeometry } from "../layout.js";
import type { SliderPositions } from "../state.js";
import { SLIDER_MAX, SLIDER_MIN } from "../state.js";
import { escapeHtml, show } from "./format.js";

export interface EmbeddingViewData {
  method: string | null;
  version: number;
  scatter: ScatterGeometry | null;
  constraints: ConstraintsJson | null;
  quality: QualityJson | null;
  sliders: SliderPositions;
  selection: ReadonlySet<number>;
  /** Indices highlighted by search; null means no active search. */
  highlights: ReadonlySet<number> | null;
}

export function renderEmbedding(data: EmbeddingViewData): string {
  if (data.method === null || data.scatter === null) {
    return `<div class="embedding-view empty-state">
<p class="placeholder">No embedding yet — choose a method and compute one.</p>
</div>`;
  }
  const interactive = data.method === "ckpca";
  const banner = interactive
    ? ""
    : `<div class="tooltip not-ckpca">Dragging needs a ckpca embedding; recompute with method "ckpca" to steer points.</div>`;
  return `<div class="embedding-view${interactive ? " interactive" : ""}" data-method="${escapeHtml(data.method)}" data-version="${data.version}">
<header class="embedding-meta">method ${escapeHtml(data.method)} · version ${data.version}</header>
${banner}
${scatterSvg(data, interactive)}
${slidersHtml(data.sliders, data.constraints, interactive)}
${qualityHtml(data.quality)}
</div>`;
}

function scatterSvg(data: EmbeddingViewData, interactive: boolean): string {
  const scatter = data.scatter;
  if (scatter === null) return "";
  const controls = new Set(
    data.constraints === null
      ? []
      : data.constraints.control_points.map((point) => point.index),
  );
  const circles = scatter.points.map((point) => {
    const classes = ["point"];
    if (controls.has(point.index)) classes.push("control");
    if (data.selection.has(point.index)) classes.push("selected");
    if (data.highlights !== null && data.highlights.has(point.index)) {
      classes.push("highlight");
    }
    if (data.highlights !== null && !data.highlights.has(point.index)) {
      classes.push("dimmed");
    }
    return `<circle class="${classes.join(" ")}" cx="${point.x}" cy="${point.y}" r="3.5" data-index="${point.index}"/>`;
  }).join("");
  return `<svg class="embedding-scatter" viewBox="0 0 ${scatter.width} ${scatter.height}" role="img" data-interactive="${interactive}">
${linksSvg(data.constraints, scatter)}
${circles}
${controlMarkersSvg(data.constraints, scatter)}
</svg>`;
}

function linksSvg(
  constraints: ConstraintsJson | null,
  scatter: ScatterGeometry,
): string {
  if (constraints === null) return "";
  const line = (kind: string, i: number, j: number): string => {
    const a = scatter.points[i];
    const b = scatter.points[j];
    if (a === undefined || b === undefined) return "";
    return `<line class="link ${kind}" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" data-i="${i}" data-j="${j}"/>`;
  };
  const must = constraints.must_links.map(([i, j]) => line("must", i, j));
  const cannot = constraints.cannot_links.map(([i, j]) => line("cannot", i, j));
  return `<g class="links">${must.join("")}${cannot.join("")}</g>`;
}

function controlMarkersSvg(
  constraints: ConstraintsJson | null,
  scatter: ScatterGeometry,
): string {
  if (constraints === null || constraints.control_points.length === 0) {
    return "";
  }
  const markers = constraints.control_points.map((point) => {
    const target = scatter.toScreen(point.x, point.y);
    return `<g class="control-marker" data-index="${point.index}" data-x="${point.x}" data-y="${point.y}">
<circle class="target" cx="${target.x}" cy="${target.y}" r="6" fill="none"/>
</g>`;
  }).join("");
  return `<g class="control-markers">${markers}</g>`;
}

function slidersHtml(
  sliders: SliderPositions,
  constraints: ConstraintsJson | null,
  interactive: boolean,
): string {
  const disabled = interactive ? "" : " disabled";
  const slider = (
    target: string,
    label: string,
    position: number,
    strength: number | null,
  ): string =>
    `<label class="strength" data-target="${target}">${label}
<input type="range" min="${SLIDER_MIN}" max="${SLIDER_MAX}" step="1" value="${position}" data-target="${target}"${disabled}/>
<output class="stat">${strength === null ? "—" : show(strength)}</output>
</label>`;
  return `<fieldset class="sliders">
<legend>constraint strengths</legend>
${slider("control", "control", sliders.mu_cp, constraints === null ? null : constraints.mu_cp)}
${slider("must", "must-link", sliders.mu_ml, constraints === null ? null : constraints.mu_ml)}
${slider("cannot", "cannot-link", sliders.mu_cl, constraints === null ? null : constraints.mu_cl)}
</fieldset>`;
}

function qualityHtml(quality: QualityJson | null): string {
  if (quality === null) {
    return `<p class="quality placeholder">quality: n/a (too few points)</p>`;
  }
  return `<dl class="quality">
<dt>trustworthiness</dt><dd class="stat">${show(quality.trustworthiness)}</dd>
<dt>knn_preservation</dt><dd class="stat">${show(quality.knn_preservation)}</dd>
<dt>shepard_spearman</dt><dd class="stat">${show(quality.shepard_spearman)}</dd>
<dt>normalized_stress</dt><dd class="stat">${show(quality.normalized_stress)}</dd>
<dt>k_used</dt><dd class="stat">${show(quality.k_used)}</dd>
</dl>`;
}
