import { describe, expect, it } from "vitest";

import {
  Action,
  StateLog,
  initialState,
  reduce,
  replay,
} from "../src/state.js";

describe("reducer", () => {
  it("switches tabs only through actions", () => {
    const next = reduce(initialState, { kind: "select-tab", tab: "management" });
    expect(next.tab).toBe("management");
    expect(initialState.tab).toBe("etl"); // no mutation
  });

  it("tracks pending jobs and lands on predictions after conditioning", () => {
    let s = reduce(initialState, { kind: "job-started", id: 4 });
    expect(s.pendingJobs).toEqual([4]);
    s = reduce(s, { kind: "job-finished", id: 4, ok: true, op: "condition" });
    expect(s.pendingJobs).toEqual([]);
    expect(s.tab).toBe("analytics-predictions");
  });

  it("stays on the current tab when a synthesis job finishes", () => {
    let s = reduce(initialState, { kind: "select-tab", tab: "etl" });
    s = reduce(s, { kind: "job-started", id: 1 });
    s = reduce(s, { kind: "job-finished", id: 1, ok: true, op: "synthesize" });
    expect(s.tab).toBe("etl");
  });

  it("replays the action log to an identical state", () => {
    const log: Action[] = [
      { kind: "select-phenomenon", id: 2 },
      { kind: "set-sigma", value: "20" },
      { kind: "select-tab", tab: "analytics-observations" },
      { kind: "set-obs-range", from: "1900", to: "1910" },
      { kind: "job-started", id: 7 },
      { kind: "job-finished", id: 7, ok: true, op: "condition" },
      { kind: "notice", text: "done" },
    ];
    const direct = replay(log);
    const viaLog = new StateLog();
    for (const action of log) {
      viaLog.dispatch(action);
    }
    expect(viaLog.state).toEqual(direct);
    expect(replay(viaLog.log)).toEqual(viaLog.state);
    expect(direct.tab).toBe("analytics-predictions");
    expect(direct.obsFrom).toBe("1900");
  });
});
