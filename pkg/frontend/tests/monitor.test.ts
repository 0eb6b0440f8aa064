import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { monitorRun } from "../src/monitor.js";
import type { RunStatusDoc } from "../src/types.js";

function fakeApi(sequence: RunStatusDoc[]): ApiClient {
  let i = 0;
  const fetchFn = async (url: string): Promise<Response> => {
    const doc = sequence[Math.min(i, sequence.length - 1)]!;
    i += 1;
    return new Response(JSON.stringify(doc), { status: 200 });
  };
  return new ApiClient("", fetchFn);
}

describe("monitorRun", () => {
  it("polls at the fixed interval until the run finishes", async () => {
    const api = fakeApi([
      { state: "running", error: null },
      { state: "running", error: null },
      { state: "done", error: null, nodes: { a: { status: "ok", duration: 0.1, cached: false, error: null } } },
    ]);
    const updates: string[] = [];
    const scheduled: number[] = [];
    const handle = monitorRun(
      api,
      "r1",
      (s) => updates.push(s.state),
      250,
      (cb, ms) => {
        scheduled.push(ms);
        cb();
        return 0;
      },
    );
    const finalStatus = await handle.done;
    expect(updates).toEqual(["running", "running", "done"]);
    expect(scheduled).toEqual([250, 250]); // no reschedule after done
    expect(finalStatus.nodes!["a"]!.status).toBe("ok");
  });

  it("stop() halts polling", async () => {
    let calls = 0;
    const fetchFn = async (): Promise<Response> => {
      calls += 1;
      return new Response(JSON.stringify({ state: "running", error: null }), { status: 200 });
    };
    const api = new ApiClient("", fetchFn);
    let resume: () => void = () => {};
    const handle = monitorRun(api, "r1", () => {}, 100, (cb) => {
      resume = cb; // capture instead of running: manual time control
      return 0;
    });
    await Promise.resolve();
    handle.stop();
    resume();
    await new Promise((r) => setTimeout(r, 0));
    expect(calls).toBe(1);
  });

  it("propagates API failures through the done promise", async () => {
    const fetchFn = async (): Promise<Response> =>
      new Response(JSON.stringify({ code: "not-found", message: "run 'x' not found" }), { status: 404 });
    const api = new ApiClient("", fetchFn);
    const handle = monitorRun(api, "x", () => {});
    await expect(handle.done).rejects.toMatchObject({ code: "not-found", status: 404 });
  });
});
