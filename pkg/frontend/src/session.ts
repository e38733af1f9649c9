// Result panes and pagination state.  Several requests may be in
// flight at once; each pane remembers the id of the request it is
// waiting for and ignores anything older, so a slow response can never
// overwrite a newer one.

export interface Pane<T> {
  requestId: number;
  status: "idle" | "loading" | "done" | "error";
  value?: T;
  error?: string;
}

export function pane<T>(): Pane<T> {
  return { requestId: 0, status: "idle" };
}

let counter = 0;

/** Monotonic across all panes; later request means larger id. */
export function nextRequestId(): number {
  counter += 1;
  return counter;
}

export function beginRequest<T>(p: Pane<T>, requestId: number): void {
  p.requestId = requestId;
  p.status = "loading";
}

/** Apply a response; stale ids are dropped and the pane is untouched. */
export function resolveRequest<T>(p: Pane<T>, requestId: number, value: T): boolean {
  if (requestId !== p.requestId) return false;
  p.status = "done";
  p.value = value;
  p.error = undefined;
  return true;
}

export function failRequest<T>(p: Pane<T>, requestId: number, message: string): boolean {
  if (requestId !== p.requestId) return false;
  p.status = "error";
  p.error = message;
  return true;
}

export interface PageCursor {
  offset: number;
  limit: number;
  total: number;
}

export function firstPage(limit: number, total = 0): PageCursor {
  return { offset: 0, limit, total };
}

export function nextPage(c: PageCursor): PageCursor {
  const offset = c.offset + c.limit;
  return offset >= c.total ? c : { ...c, offset };
}

export function prevPage(c: PageCursor): PageCursor {
  return { ...c, offset: Math.max(0, c.offset - c.limit) };
}

export function pageLabel(c: PageCursor): string {
  if (c.total === 0) return "0 rows";
  const last = Math.min(c.offset + c.limit, c.total);
  return `rows ${c.offset + 1}-${last} of ${c.total}`;
}
