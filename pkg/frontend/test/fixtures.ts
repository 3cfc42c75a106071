/**
 * Fixed payload fixtures. The numbers are deliberately awkward — long
 * mantissas, exponent notation, float artifacts — so the verbatim-rendering
 * tests would catch any rounding or reformatting in the view layer.
 */

import type {
  ClusteringJson,
  ConstraintsJson,
  FieldSummaryJson,
  QualityJson,
  SearchResponse,
} from "../src/types.js";

export const MASS_SUMMARY: FieldSummaryJson = {
  field: "mass",
  kind: "numeric",
  count: 120,
  missing: 3,
  min: 16.043,
  max: 386.72100000000006,
  mean: 142.58333333333334,
  std: 58.19491848206667,
  std_kind: "sample",
  q1: 100.203,
  median: 138.255,
  q3: 180.4115,
  histogram: [
    [16.043, 34.5769, 1],
    [34.5769, 53.1108, 3],
    [53.1108, 71.6447, 7],
    [71.6447, 90.1786, 12],
    [90.1786, 108.7125, 18],
    [108.7125, 127.2464, 25],
    [127.2464, 145.7803, 19],
    [145.7803, 164.3142, 14],
    [164.3142, 182.8481, 9],
    [182.8481, 201.382, 6],
    [201.382, 219.9159, 4],
    [219.9159, 238.4498, 3],
    [238.4498, 256.9837, 2],
    [256.9837, 275.5176, 2],
    [275.5176, 294.0515, 1],
    [294.0515, 312.5854, 1],
    [312.5854, 331.1193, 0],
    [331.1193, 349.6532, 1],
    [349.6532, 368.1871, 0],
    [368.1871, 386.72100000000006, 2],
  ],
  kde: [
    [16.043, 1e-7],
    [108.7125, 0.30000000000000004],
    [201.382, 0.0212890070034],
    [294.0515, 0.00041],
    [386.72100000000006, 0.0000017],
  ],
  boxplot: {
    median: 138.255,
    q1: 100.203,
    q3: 180.4115,
    whisker_lo: 16.043,
    whisker_hi: 299.5,
    outliers: 2,
  },
  categories: null,
  group_boxplots: null,
};

export const FAMILY_SUMMARY: FieldSummaryJson = {
  field: "family",
  kind: "categorical",
  count: 120,
  missing: 0,
  min: null,
  max: null,
  mean: null,
  std: null,
  std_kind: null,
  q1: null,
  median: null,
  q3: null,
  histogram: null,
  kde: null,
  boxplot: null,
  categories: [
    ["alkane", 48],
    ["alcohol", 42],
    ["aromatic", 30],
  ],
  group_boxplots: [
    ["alkane", {
      median: 114.232,
      q1: 86.178,
      q3: 142.286,
      whisker_lo: 30.07,
      whisker_hi: 198.394,
      outliers: 0,
    }],
    ["alcohol", {
      median: 116.20100000000001,
      q1: 88.14999999999999,
      q3: 144.255,
      whisker_lo: 46.069,
      whisker_hi: 200.36599999999999,
      outliers: 1,
    }],
    ["aromatic", {
      median: 134.22,
      q1: 106.168,
      q3: 162.27,
      whisker_lo: 78.114,
      whisker_hi: 218.38,
      outliers: 0,
    }],
  ],
};

export const EMPTY_SUMMARY: FieldSummaryJson = {
  field: "logp",
  kind: "numeric",
  count: 0,
  missing: 120,
  min: null,
  max: null,
  mean: null,
  std: null,
  std_kind: null,
  q1: null,
  median: null,
  q3: null,
  histogram: null,
  kde: null,
  boxplot: null,
  categories: null,
  group_boxplots: null,
};

export const CLUSTERING_FIXTURE: ClusteringJson = {
  labels: [0, 0, 1, 2, 1, 0, 2, 2, 1, 0],
  k: 3,
  inertia: 41.27340000000001,
  seed: 7,
  iterations: 9,
  validity: {
    silhouette: 0.5319148936170213,
    calinski_harabasz: 28.904761904761905,
    davies_bouldin: 0.6842105263157895,
  },
};

export const QUALITY_FIXTURE: QualityJson = {
  trustworthiness: 0.9529411764705882,
  knn_preservation: 0.7573333333333333,
  shepard_spearman: 0.47600000000000003,
  normalized_stress: 0.42740000000000006,
  k_used: 10,
};

export const CONSTRAINTS_FIXTURE: ConstraintsJson = {
  control_points: [{ index: 5, x: 0.4446859109027653, y: 0.0950367684449468 }],
  must_links: [[1, 2]],
  cannot_links: [[0, 3]],
  mu_cp: 100.0,
  mu_ml: 1.0,
  mu_cl: 1.0,
  lambda: 0.001,
};

export const SEARCH_FIXTURE: SearchResponse = {
  query: "O=",
  count: 2,
  matches: [
    { index: 3, id: "mol-0003", smiles: "CCC(=O)O" },
    { index: 8, id: "mol-0008", smiles: "CC(=O)OC" },
  ],
};

/** Ten points on a ring, good enough for scatter-geometry fixtures. */
export const COORDS_FIXTURE: [number, number][] = [
  [1.0, 0.0],
  [0.8090169943749475, 0.5877852522924731],
  [0.30901699437494745, 0.9510565162951535],
  [-0.30901699437494734, 0.9510565162951536],
  [-0.8090169943749473, 0.5877852522924732],
  [-1.0, 0.00000000000000012246467991473532],
  [-0.8090169943749475, -0.587785252292473],
  [-0.30901699437494756, -0.9510565162951535],
  [0.30901699437494723, -0.9510565162951536],
  [0.8090169943749473, -0.5877852522924734],
];
