/**
 * Clustering view: validity metrics plus the current embedding scatter
 * colored by cluster label. Metrics render verbatim from the server
 * payload; point positions come projected from the layout module.
 */

import type { ClusteringJson } from "../types.js";
import type { ScatterGeometry } from "../layout.js";
import { clusterColors } from "../layout.js";
import { meta, show } from "./format.js";

export function renderClustering(
  clustering: ClusteringJson,
  scatter: ScatterGeometry | null,
): string {
  const header = `<dl class="cluster-meta">
<dt>algorithm k</dt><dd>${show(clustering.k)}</dd>
<dt>iterations</dt><dd>${show(clustering.iterations)}</dd>
<dt>seed</dt><dd>${meta(clustering.seed)}</dd>
<dt>inertia</dt><dd>${show(clustering.inertia)}</dd>
</dl>`;
  const validity = clustering.validity === null
    ? `<p class="validity degenerate">validity: n/a (degenerate labeling)</p>`
    : `<dl class="validity">
<dt>silhouette</dt><dd class="stat">${show(clustering.validity.silhouette)}</dd>
<dt>calinski_harabasz</dt><dd class="stat">${show(clustering.validity.calinski_harabasz)}</dd>
<dt>davies_bouldin</dt><dd class="stat">${show(clustering.validity.davies_bouldin)}</dd>
</dl>`;
  const plot = scatter === null
    ? `<p class="placeholder">Compute an embedding to see clusters in 2-D.</p>`
    : clusterScatterSvg(clustering, scatter);
  return `<div class="clustering-view">${header}${validity}${plot}</div>`;
}

function clusterScatterSvg(
  clustering: ClusteringJson,
  scatter: ScatterGeometry,
): string {
  const colors = clusterColors(clustering.labels);
  const circles = scatter.points.map((point) => {
    const label = clustering.labels[point.index];
    const fill = colors[point.index];
    return `<circle class="point" cx="${point.x}" cy="${point.y}" r="3.5" fill="${fill ?? "#888888"}" data-index="${point.index}" data-label="${label ?? ""}"/>`;
  }).join("");
  return `<svg class="cluster-scatter" viewBox="0 0 ${scatter.width} ${scatter.height}" role="img">${circles}</svg>`;
}
