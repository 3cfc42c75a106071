/**
 * Wire types for the moleda server's REST and WebSocket contract.
 *
 * Every shape here mirrors a server payload field-for-field. The UI treats
 * these as the single source of truth for displayed values: statistics and
 * coordinates are never recomputed client-side.
 */

// -- collections ------------------------------------------------------------

export interface CollectionInfo {
  name: string;
  size: number;
}

export interface CollectionList {
  collections: CollectionInfo[];
}

export interface FieldInfo {
  name: string;
  type: string;
}

export interface FieldList {
  fields: FieldInfo[];
}

/** Documents are id plus arbitrary stored fields. */
export interface DocumentJson {
  id: string;
  [field: string]: unknown;
}

// -- filter grammar (request bodies only; evaluated server-side) -------------

export type FilterLeafOp =
  | "eq"
  | "ne"
  | "lt"
  | "lte"
  | "gt"
  | "gte"
  | "in"
  | "exists"
  | "contains";

export interface FilterLeaf {
  field: string;
  op: FilterLeafOp;
  value?: unknown;
}

export type Filter =
  | FilterLeaf
  | { and: Filter[] }
  | { or: Filter[] }
  | { not: Filter };

// -- field summaries ----------------------------------------------------------

export interface BoxplotJson {
  median: number;
  q1: number;
  q3: number;
  whisker_lo: number;
  whisker_hi: number;
  /** Count of values beyond the whiskers (not the values themselves). */
  outliers: number;
}

/** [lo, hi, count] per bin. */
export type HistogramBin = [number, number, number];

/** [x, density] per grid point. */
export type KdePoint = [number, number];

/** [category value, count]. */
export type CategoryCount = [string, number];

export interface FieldSummaryJson {
  field: string;
  kind: "numeric" | "categorical";
  count: number;
  missing: number;
  min: number | null;
  max: number | null;
  mean: number | null;
  std: number | null;
  std_kind: string | null;
  q1: number | null;
  median: number | null;
  q3: number | null;
  histogram: HistogramBin[] | null;
  kde: KdePoint[] | null;
  boxplot: BoxplotJson | null;
  categories: CategoryCount[] | null;
  group_boxplots: [string, BoxplotJson][] | null;
}

// -- sessions -----------------------------------------------------------------

export interface SessionInfo {
  id: string;
  collection: string;
  count: number;
}

export interface SearchMatch {
  index: number;
  id: string;
  smiles: string;
}

export interface SearchResponse {
  query: string;
  count: number;
  matches: SearchMatch[];
}

export interface DensityStats {
  mean: number;
  min: number;
  max: number;
}

export interface FingerprintResponse {
  method: string;
  count: number;
  dimension: number;
  n_failed: number;
  density: DensityStats | null;
}

export interface ValidityJson {
  silhouette: number | null;
  calinski_harabasz: number | null;
  davies_bouldin: number | null;
}

export interface ClusteringJson {
  labels: number[];
  k: number;
  inertia: number | null;
  seed: number | null;
  iterations: number;
  validity: ValidityJson | null;
}

export interface QualityJson {
  trustworthiness: number;
  knn_preservation: number;
  shepard_spearman: number | null;
  normalized_stress: number | null;
  k_used: number;
}

export interface ControlPointJson {
  index: number;
  x: number;
  y: number;
}

export interface ConstraintsJson {
  control_points: ControlPointJson[];
  must_links: [number, number][];
  cannot_links: [number, number][];
  mu_cp: number;
  mu_ml: number;
  mu_cl: number;
  lambda: number;
}

/** One [x, y] pair per molecule, in embedding units. */
export type Coords = [number, number][];

export interface EmbeddingPayload {
  version: number;
  method: string;
  coords: Coords;
  constraints: ConstraintsJson | null;
}

export interface EmbedResponse extends EmbeddingPayload {
  quality: QualityJson | null;
}

// -- WebSocket events ----------------------------------------------------------

export interface EmbeddingEvent extends EmbeddingPayload {
  type: "embedding";
}

export interface ErrorEvent {
  type: "error";
  code: string;
  message: string;
}

export type ServerEvent = EmbeddingEvent | ErrorEvent;

// -- WebSocket outbound messages -------------------------------------------------

export type LinkKind = "must" | "cannot";
export type StrengthTarget = "control" | "must" | "cannot";

export interface AddControlMessage {
  type: "add_control";
  index: number;
  x: number;
  y: number;
}

export interface MoveControlMessage {
  type: "move_control";
  index: number;
  x: number;
  y: number;
}

export interface RemoveControlMessage {
  type: "remove_control";
  index: number;
}

export interface AddLinkMessage {
  type: "add_link";
  kind: LinkKind;
  i: number;
  j: number;
}

export interface RemoveLinkMessage {
  type: "remove_link";
  kind: LinkKind;
  i: number;
  j: number;
}

export interface SetStrengthMessage {
  type: "set_strength";
  target: StrengthTarget;
  value: number;
}

export type InteractionMessage =
  | AddControlMessage
  | MoveControlMessage
  | RemoveControlMessage
  | AddLinkMessage
  | RemoveLinkMessage
  | SetStrengthMessage;

// -- API errors -------------------------------------------------------------------

export interface ErrorBody {
  code: string;
  message: string;
}
