import { describe, expect, it } from "vitest";

import {
  editBuffer,
  formModel,
  refreshBuffer,
  renderScript,
  runPayload,
  setField,
  validate,
} from "../src/palette.js";
import { CommandDoc } from "../src/types.js";

const FILTER: CommandDoc = {
  name: "filter",
  param_count: 1,
  param_descriptions: ["condition"],
  template: "filter(t, $PAR1$)",
};

const LOG_HISTOGRAM: CommandDoc = {
  name: "log_histogram",
  param_count: 3,
  param_descriptions: ["column number", "logarithmic step", "axes to apply the log scale"],
  template: "log_histogram(t, $PAR1$, $PAR2$, $PAR3$)",
};

const ECDF: CommandDoc = {
  name: "ecdf",
  param_count: 0,
  param_descriptions: [],
  template: "ecdf(t)",
};

describe("renderScript", () => {
  it("substitutes each placeholder", () => {
    expect(renderScript(LOG_HISTOGRAM.template, ["1", "0.06", "xy"])).toBe(
      "log_histogram(t, 1, 0.06, xy)",
    );
  });

  it("is a single pass: placeholder text inside an argument stays literal", () => {
    expect(renderScript(FILTER.template, ["$PAR1$"])).toBe("filter(t, $PAR1$)");
    expect(renderScript("f($PAR1$, $PAR2$)", ["$PAR2$", "b"])).toBe("f($PAR2$, b)");
  });

  it("leaves unknown placeholder indices untouched", () => {
    expect(renderScript("g($PAR3$)", ["a"])).toBe("g($PAR3$)");
  });
});

describe("formModel", () => {
  it("builds one labeled field per parameter", () => {
    const m = formModel(LOG_HISTOGRAM);
    expect(m.fields.map((f) => f.label)).toEqual([
      "column number",
      "logarithmic step",
      "axes to apply the log scale",
    ]);
    expect(m.fields.every((f) => f.value === "")).toBe(true);
  });

  it("renders zero-parameter commands immediately", () => {
    const m = formModel(ECDF);
    expect(m.fields).toEqual([]);
    expect(m.buffer).toBe("ecdf(t)");
    expect(validate(m)).toEqual([]);
  });

  it("tracks field edits into the buffer", () => {
    let m = formModel(FILTER);
    m = setField(m, 0, "t[[1]] < 11000");
    expect(m.buffer).toBe("filter(t, t[[1]] < 11000)");
    expect(m.edited).toBe(false);
  });
});

describe("editBuffer", () => {
  it("marks the model edited when the text diverges", () => {
    let m = setField(formModel(FILTER), 0, "t[[1]] > 0");
    m = editBuffer(m, "filter(t, t[[1]] > 5)");
    expect(m.edited).toBe(true);
  });

  it("typing the rendered script back clears the override", () => {
    let m = setField(formModel(FILTER), 0, "t[[1]] > 0");
    m = editBuffer(m, "filter(t, t[[1]] > 5)");
    m = editBuffer(m, "filter(t, t[[1]] > 0)");
    expect(m.edited).toBe(false);
  });

  it("field edits stop refreshing an overridden buffer", () => {
    let m = setField(formModel(FILTER), 0, "a");
    m = editBuffer(m, "filter(t, custom)");
    m = setField(m, 0, "b");
    expect(m.buffer).toBe("filter(t, custom)");
  });
});

describe("validate", () => {
  it("flags each empty field with its label", () => {
    const m = setField(formModel(LOG_HISTOGRAM), 0, "1");
    const errors = validate(m);
    expect(errors).toHaveLength(2);
    expect(errors[0]).toContain("logarithmic step");
    expect(errors[1]).toContain("axes to apply the log scale");
  });

  it("flags an arity mismatch", () => {
    const m = formModel(FILTER);
    m.fields.push({ label: "extra", value: "x" });
    expect(validate(m).some((e) => e.includes("takes 1 parameters"))).toBe(true);
  });

  it("accepts blank fields once the buffer is overridden", () => {
    let m = formModel(LOG_HISTOGRAM);
    m = editBuffer(m, "log_histogram(t, 1, 0.1, x)");
    expect(validate(m)).toEqual([]);
  });

  it("rejects an empty override buffer", () => {
    let m = formModel(ECDF);
    m = editBuffer(m, "   ");
    expect(validate(m)).toEqual(["script buffer is empty"]);
  });
});

describe("runPayload", () => {
  it("sends plain args when the buffer was never touched", () => {
    const m = setField(formModel(FILTER), 0, "t[[1]] > 3");
    expect(runPayload(m)).toEqual({ name: "filter", args: ["t[[1]] > 3"] });
  });

  it("carries the edited buffer as the override", () => {
    let m = setField(formModel(FILTER), 0, "t[[1]] > 3");
    m = editBuffer(m, "filter(t, t[[1]] > 99)");
    expect(runPayload(m)).toEqual({
      name: "filter",
      args: ["t[[1]] > 3"],
      scriptOverride: "filter(t, t[[1]] > 99)",
    });
  });

  it("throws instead of building an invalid payload", () => {
    expect(() => runPayload(formModel(FILTER))).toThrow("is empty");
  });
});
