import { describe, expect, it } from "vitest";

import { canonicalGraphDoc, canonicalJson } from "../src/canonical.js";

describe("canonicalJson", () => {
  it("sorts object keys recursively and strips whitespace", () => {
    expect(canonicalJson({ b: 1, a: { d: true, c: null } })).toBe('{"a":{"c":null,"d":true},"b":1}');
  });

  it("keeps array order", () => {
    expect(canonicalJson([3, 1, 2])).toBe("[3,1,2]");
  });

  it("formats numbers like the server", () => {
    expect(canonicalJson({ f: 0.8, i: 40, s: 3 })).toBe('{"f":0.8,"i":40,"s":3}');
  });

  it("rejects non-JSON values", () => {
    expect(() => canonicalJson({ fn: () => 0 })).toThrow();
  });
});

describe("canonicalGraphDoc", () => {
  it("sorts nodes by id and edges lexicographically", () => {
    const doc = {
      version: "1",
      nodes: [
        { id: "z", type: "scaler", params: { kind: "min-max" } },
        { id: "a", type: "table-input", params: { path: "x.csv" } },
      ],
      edges: [["z", "a", "table"], ["a", "z", "table"]] as [string, string, string][],
    };
    const out = canonicalGraphDoc(doc);
    expect(out.indexOf('"id":"a"')).toBeLessThan(out.indexOf('"id":"z"'));
    expect(out.indexOf('["a","z","table"]')).toBeLessThan(out.indexOf('["z","a","table"]'));
  });

  it("is a fixpoint under re-parsing", () => {
    const doc = {
      version: "1",
      nodes: [{ id: "n", type: "scaler", params: { kind: "standard" } }],
      edges: [] as [string, string, string][],
    };
    const once = canonicalGraphDoc(doc);
    expect(canonicalGraphDoc(JSON.parse(once))).toBe(once);
  });
});
