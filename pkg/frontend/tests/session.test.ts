import { describe, expect, it } from "vitest";

import {
  beginRequest,
  failRequest,
  firstPage,
  nextPage,
  nextRequestId,
  pageLabel,
  pane,
  prevPage,
  resolveRequest,
} from "../src/session.js";

describe("result panes", () => {
  it("applies the response that matches the pane's request", () => {
    const p = pane<string>();
    const rid = nextRequestId();
    beginRequest(p, rid);
    expect(resolveRequest(p, rid, "fresh")).toBe(true);
    expect(p.status).toBe("done");
    expect(p.value).toBe("fresh");
  });

  it("drops a stale response once a newer request is in flight", () => {
    const p = pane<string>();
    const first = nextRequestId();
    beginRequest(p, first);
    const second = nextRequestId();
    beginRequest(p, second);
    // the slow first response lands after the second was issued
    expect(resolveRequest(p, first, "stale")).toBe(false);
    expect(p.value).toBeUndefined();
    expect(resolveRequest(p, second, "fresh")).toBe(true);
    expect(p.value).toBe("fresh");
  });

  it("keeps panes independent under concurrent requests", () => {
    const a = pane<number>();
    const b = pane<number>();
    const ra = nextRequestId();
    const rb = nextRequestId();
    beginRequest(a, ra);
    beginRequest(b, rb);
    // responses land out of order
    expect(resolveRequest(b, rb, 2)).toBe(true);
    expect(resolveRequest(a, ra, 1)).toBe(true);
    expect(a.value).toBe(1);
    expect(b.value).toBe(2);
  });

  it("ignores stale failures the same way", () => {
    const p = pane<string>();
    const first = nextRequestId();
    beginRequest(p, first);
    const second = nextRequestId();
    beginRequest(p, second);
    expect(failRequest(p, first, "timeout")).toBe(false);
    expect(resolveRequest(p, second, "ok")).toBe(true);
    expect(p.error).toBeUndefined();
  });

  it("records a current failure", () => {
    const p = pane<string>();
    const rid = nextRequestId();
    beginRequest(p, rid);
    expect(failRequest(p, rid, "boom")).toBe(true);
    expect(p.status).toBe("error");
    expect(p.error).toBe("boom");
  });
});

describe("page cursors", () => {
  it("advances and clamps to the total", () => {
    let c = { ...firstPage(25), total: 60 };
    c = nextPage(c);
    expect(c.offset).toBe(25);
    c = nextPage(c);
    expect(c.offset).toBe(50);
    // already on the last page
    expect(nextPage(c).offset).toBe(50);
  });

  it("never walks before the first row", () => {
    const c = { offset: 10, limit: 25, total: 60 };
    expect(prevPage(c).offset).toBe(0);
    expect(prevPage(prevPage(c)).offset).toBe(0);
  });

  it("labels the visible window", () => {
    expect(pageLabel({ offset: 25, limit: 25, total: 60 })).toBe("rows 26-50 of 60");
    expect(pageLabel({ offset: 50, limit: 25, total: 60 })).toBe("rows 51-60 of 60");
    expect(pageLabel({ offset: 0, limit: 25, total: 0 })).toBe("0 rows");
  });
});
