/**
 * Typed REST client for the moleda server.
 *
 * Thin wrapper over fetch: one method per route, JSON in and out, and the
 * server's {code, message} error envelope surfaced as ApiError. The fetch
 * implementation is injectable so tests can run without a network.
 */

import type {
  ClusteringJson,
  CollectionList,
  DocumentJson,
  EmbedResponse,
  EmbeddingPayload,
  ErrorBody,
  FieldList,
  FieldSummaryJson,
  Filter,
  FingerprintResponse,
  SearchResponse,
  SessionInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface FetchOptions {
  filter?: Filter;
  fields?: string[];
  limit?: number;
  sample?: boolean;
  seed?: number;
}

export interface SummaryOptions {
  filter?: Filter;
  bins?: number | "auto";
  group_by?: string;
}

export interface SessionOptions extends Omit<FetchOptions, "fields"> {}

export interface FingerprintRequest {
  method?: string;
  params?: { max_len?: number; n_bits?: number };
}

export interface ClusterRequest {
  algo?: string;
  k: number;
  seed?: number;
  linkage?: string;
}

export interface EmbedRequest {
  method: string;
  kernel?: { kind: string; gamma?: number };
  constraints?: unknown;
  params?: Record<string, unknown>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  /** ws:// (or wss://) URL of the interaction socket for a session. */
  wsUrl(sessionId: string): string {
    const ws = this.base.replace(/^http/, "ws");
    return `${ws}/sessions/${sessionId}/interact`;
  }

  listCollections(): Promise<CollectionList> {
    return this.request("GET", "/collections");
  }

  collectionFields(name: string): Promise<FieldList> {
    return this.request("GET", `/collections/${encodeURIComponent(name)}/fields`);
  }

  summarize(
    name: string,
    fields: string[],
    options: SummaryOptions = {},
  ): Promise<FieldSummaryJson[]> {
    const opts: Record<string, unknown> = {};
    if (options.bins !== undefined) opts.bins = options.bins;
    if (options.group_by !== undefined) opts.group_by = options.group_by;
    return this.request(
      "POST",
      `/collections/${encodeURIComponent(name)}/summary`,
      { fields, filter: options.filter ?? null, opts },
    );
  }

  fetchDocuments(
    name: string,
    options: FetchOptions = {},
  ): Promise<DocumentJson[]> {
    return this.request(
      "POST",
      `/collections/${encodeURIComponent(name)}/fetch`,
      { ...options },
    );
  }

  createSession(
    collection: string,
    options: SessionOptions = {},
  ): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { collection, ...options });
  }

  deleteSession(sessionId: string): Promise<{ id: string; deleted: boolean }> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  search(sessionId: string, query: string): Promise<SearchResponse> {
    const q = encodeURIComponent(query);
    return this.request("GET", `/sessions/${sessionId}/search?q=${q}`);
  }

  fingerprint(
    sessionId: string,
    request: FingerprintRequest = {},
  ): Promise<FingerprintResponse> {
    return this.request("POST", `/sessions/${sessionId}/fingerprint`, request);
  }

  cluster(sessionId: string, request: ClusterRequest): Promise<ClusteringJson> {
    return this.request("POST", `/sessions/${sessionId}/cluster`, request);
  }

  embed(sessionId: string, request: EmbedRequest): Promise<EmbedResponse> {
    return this.request("POST", `/sessions/${sessionId}/embed`, request);
  }

  getEmbedding(sessionId: string): Promise<EmbeddingPayload> {
    return this.request("GET", `/sessions/${sessionId}/embedding`);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let envelope: ErrorBody;
      try {
        envelope = (await response.json()) as ErrorBody;
      } catch {
        throw new ApiError(response.status, "unreadable_error",
          `HTTP ${response.status}`);
      }
      throw new ApiError(response.status, envelope.code, envelope.message);
    }
    return (await response.json()) as T;
  }
}
