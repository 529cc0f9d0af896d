// JSON API client: one in-flight request per position, retries with
// backoff, stale responses dropped by board-key comparison.

export type ValueName = "win" | "tie" | "loss" | "unknown";

export interface ChildValue {
  move: { cell: [number, number]; quad: number | null; direction: number | null };
  board: string;
  value: ValueName;
}

export interface ValueResponse {
  version: number;
  board: string;
  stones: number;
  side_to_move: string;
  value: ValueName;
  source: string;
  reason?: string;
  children: ChildValue[];
}

export interface ApiOptions {
  retries?: number;
  backoffMs?: number;
  fetchFn?: typeof fetch;
}

export async function requestValues(
  baseUrl: string,
  boardKey: bigint,
  opts: ApiOptions = {},
): Promise<ValueResponse> {
  const retries = opts.retries ?? 3;
  const backoff = opts.backoffMs ?? 250;
  const doFetch = opts.fetchFn ?? fetch;
  let lastError: unknown = null;
  for (let attempt = 0; attempt <= retries; attempt++) {
    try {
      const resp = await doFetch(`${baseUrl}/value?board=${boardKey}`);
      if (resp.status >= 500) throw new Error(`server error ${resp.status}`);
      const body = (await resp.json()) as ValueResponse;
      if (resp.status !== 200) throw new Error((body as any).error ?? `HTTP ${resp.status}`);
      return body;
    } catch (err) {
      lastError = err;
      if (attempt < retries) await sleep(backoff * 2 ** attempt);
    }
  }
  throw lastError instanceof Error ? lastError : new Error(String(lastError));
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
