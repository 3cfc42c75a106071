/**
 * Molecule inspector and search panel.
 *
 * The detail card shows a molecule's document fields verbatim, its cluster
 * label when a clustering exists, and the names of its set structural keys
 * when the active fingerprint method exposes them. The search list renders
 * the server's substring matches; an empty query clears all highlights.
 */

import type { SearchResponse } from "../types.js";
import { escapeHtml, meta } from "./format.js";

export interface MoleculeDetail {
  index: number;
  id: string;
  smiles: string;
  fields: Record<string, unknown>;
  clusterLabel: number | null;
  /** Names of set structural keys; null when the method has none. */
  structuralKeys: string[] | null;
}

export function renderInspector(
  detail: MoleculeDetail | null,
  search: SearchResponse | null,
): string {
  const card = detail === null
    ? `<p class="placeholder">Hover or click a point to inspect it.</p>`
    : detailCard(detail);
  return `<div class="inspector-view">
${searchPanel(search)}
${card}
</div>`;
}

function detailCard(detail: MoleculeDetail): string {
  const fieldRows = Object.entries(detail.fields).map(([name, value]) =>
    `<tr><th>${escapeHtml(name)}</th><td>${escapeHtml(String(value))}</td></tr>`,
  ).join("");
  const keys = detail.structuralKeys === null
    ? `<p class="structural-keys placeholder">structural keys: n/a for this fingerprint method</p>`
    : detail.structuralKeys.length === 0
      ? `<p class="structural-keys">structural keys: none set</p>`
      : `<ul class="structural-keys">${detail.structuralKeys.map((key) =>
          `<li>${escapeHtml(key)}</li>`).join("")}</ul>`;
  return `<article class="molecule-detail" data-index="${detail.index}">
<h3>${escapeHtml(detail.id)}</h3>
<code class="smiles">${escapeHtml(detail.smiles)}</code>
<p class="cluster-label">cluster: ${meta(detail.clusterLabel)}</p>
<table class="fields"><tbody>${fieldRows}</tbody></table>
${keys}
</article>`;
}

function searchPanel(search: SearchResponse | null): string {
  if (search === null || search.query === "") {
    return `<div class="search-panel" data-active="false">
<p class="search-state">No active search — highlights cleared.</p>
</div>`;
  }
  const rows = search.matches.map((match) =>
    `<li class="match" data-index="${match.index}">
<span class="match-id">${escapeHtml(match.id)}</span>
<code class="smiles">${escapeHtml(match.smiles)}</code>
</li>`,
  ).join("");
  return `<div class="search-panel" data-active="true">
<p class="search-state">${search.count} match(es) for <code>${escapeHtml(search.query)}</code></p>
<ul class="matches">${rows}</ul>
</div>`;
}
