/**
 * Run monitor: polls run status at a fixed interval until the run leaves the
 * running state.  The scheduler is injectable so tests drive time manually.
 */

import type { ApiClient } from "./api.js";
import type { RunStatusDoc } from "./types.js";

export type Scheduler = (callback: () => void, ms: number) => unknown;

export interface MonitorHandle {
  stop(): void;
  done: Promise<RunStatusDoc>;
}

export function monitorRun(
  api: ApiClient,
  runId: string,
  onUpdate: (status: RunStatusDoc) => void,
  intervalMs = 500,
  schedule: Scheduler = (cb, ms) => setTimeout(cb, ms),
): MonitorHandle {
  let stopped = false;
  let resolveDone: (status: RunStatusDoc) => void;
  let rejectDone: (err: unknown) => void;
  const done = new Promise<RunStatusDoc>((resolve, reject) => {
    resolveDone = resolve;
    rejectDone = reject;
  });

  const tick = async () => {
    if (stopped) {
      return;
    }
    let status: RunStatusDoc;
    try {
      status = await api.runStatus(runId);
    } catch (err) {
      stopped = true;
      rejectDone(err);
      return;
    }
    onUpdate(status);
    if (status.state === "running") {
      schedule(tick, intervalMs);
    } else {
      stopped = true;
      resolveDone(status);
    }
  };
  void tick();

  return {
    stop() {
      stopped = true;
    },
    done,
  };
}
