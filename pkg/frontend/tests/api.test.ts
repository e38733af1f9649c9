import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, VersionMismatchError } from "../src/api.js";

interface Call {
  url: string;
  method: string;
  body?: Record<string, unknown>;
}

/** fetch stub: records calls, replies from a canned route table. */
function stubClient(routes: Record<string, unknown>) {
  const calls: Call[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const call: Call = { url, method };
    if (typeof init?.body === "string") call.body = JSON.parse(init.body);
    calls.push(call);
    const key = `${method} ${url.split("?")[0]}`;
    const reply = routes[key];
    if (reply === undefined) {
      return new Response(JSON.stringify({ detail: `no route ${key}` }), { status: 404 });
    }
    return new Response(JSON.stringify(reply), { status: 200 });
  };
  return { calls, api: new ApiClient("", fetchFn) };
}

const ok = (extra: Record<string, unknown> = {}) => ({ schema_version: 1, ...extra });

describe("request shape", () => {
  it("stamps schema_version into every POST body", async () => {
    const { calls, api } = stubClient({ "POST /query": ok({ meta: {} }) });
    await api.runQuery("s1", "SELECT V1 AS V1 FROM t", "out", 4);
    expect(calls[0]?.body).toEqual({
      schema_version: 1,
      storage: "s1",
      sql: "SELECT V1 AS V1 FROM t",
      dest: "out",
      workers: 4,
    });
  });

  it("sends script_override only when the buffer was edited", async () => {
    const { calls, api } = stubClient({
      "POST /commands/run": ok({ script: "", result: { kind: "table" }, plot_ids: [] }),
    });
    await api.runCommand({ storage: "s", table: "t", name: "filter", args: ["a"] });
    expect(calls[0]?.body).not.toHaveProperty("script_override");
    await api.runCommand({
      storage: "s",
      table: "t",
      name: "filter",
      args: ["a"],
      scriptOverride: "filter(t, b)",
    });
    expect(calls[1]?.body?.script_override).toBe("filter(t, b)");
  });

  it("escapes path segments", async () => {
    const { calls, api } = stubClient({
      "GET /storages/a%20b/tables/x%2Fy": ok({ meta: {}, rows: [] }),
    });
    await api.tablePage("a b", "x/y", 0, 10);
    expect(calls[0]?.url).toBe("/storages/a%20b/tables/x%2Fy?offset=0&limit=10");
  });

  it("pages tables with GETs only", async () => {
    const { calls, api } = stubClient({
      "GET /storages/s/tables/out": ok({ meta: {}, offset: 0, limit: 10, total_rows: 30, rows: [] }),
    });
    await api.tablePage("s", "out", 0, 10);
    await api.tablePage("s", "out", 10, 10);
    await api.tablePage("s", "out", 20, 10);
    expect(calls.map((c) => c.method)).toEqual(["GET", "GET", "GET"]);
  });
});

describe("response handling", () => {
  it("unwraps list payloads", async () => {
    const { api } = stubClient({
      "GET /storages": ok({ storages: [{ id: "s1", kind: "relational" }] }),
    });
    expect(await api.listStorages()).toEqual([{ id: "s1", kind: "relational" }]);
  });

  it("raises VersionMismatchError on a foreign schema_version", async () => {
    const { api } = stubClient({ "GET /commands": { schema_version: 9, commands: [] } });
    await expect(api.listCommands()).rejects.toBeInstanceOf(VersionMismatchError);
    await expect(api.listCommands()).rejects.toThrow(/schema_version 9/);
  });

  it("maps HTTP errors to ApiError with the service detail", async () => {
    const fetchFn = async () =>
      new Response(JSON.stringify({ detail: "table 'x' not found" }), { status: 404 });
    const api = new ApiClient("", fetchFn);
    const err = await api.listStorages().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.message).toBe("table 'x' not found");
  });

  it("stringifies structured error details", async () => {
    const detail = { message: "expected SELECT", line: 1, column: 3 };
    const fetchFn = async () => new Response(JSON.stringify({ detail }), { status: 400 });
    const api = new ApiClient("", fetchFn);
    const err = await api.runQuery("s", "bad", "o").catch((e) => e);
    expect(err.message).toContain("expected SELECT");
    expect(err.message).toContain("column");
  });

  it("survives a non-JSON error body", async () => {
    const fetchFn = async () =>
      new Response("<html>gateway timeout</html>", { status: 502, statusText: "Bad Gateway" });
    const api = new ApiClient("", fetchFn);
    const err = await api.listStorages().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toBe("Bad Gateway");
  });
});
