/**
 * Dashboard state: a deterministic reducer over explicit actions.
 *
 * Every state transition happens through dispatch, and the action log alone
 * replays to an identical state, which keeps the UI auditable: tabs switch
 * only on user action or job completion, never as a rendering side effect.
 */

export type Tab =
  | "etl"
  | "management"
  | "analytics-observations"
  | "analytics-predictions";

export interface ViewState {
  phenomenonId: number | null;
  hypothesisId: number | null;
  tab: Tab;
  pendingJobs: number[];
  sigma: string;
  observedSymbol: string;
  /** observation subset filter: inclusive coordinate range, blank = all */
  obsFrom: string;
  obsTo: string;
  notice: string;
}

export type Action =
  | { kind: "select-tab"; tab: Tab }
  | { kind: "select-phenomenon"; id: number | null }
  | { kind: "select-hypothesis"; id: number | null }
  | { kind: "set-sigma"; value: string }
  | { kind: "set-symbol"; value: string }
  | { kind: "set-obs-range"; from: string; to: string }
  | { kind: "job-started"; id: number }
  | { kind: "job-finished"; id: number; ok: boolean; op: string }
  | { kind: "notice"; text: string };

export const initialState: ViewState = {
  phenomenonId: null,
  hypothesisId: null,
  tab: "etl",
  pendingJobs: [],
  sigma: "10",
  observedSymbol: "",
  obsFrom: "",
  obsTo: "",
  notice: "",
};

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.kind) {
    case "select-tab":
      return { ...state, tab: action.tab, notice: "" };
    case "select-phenomenon":
      return { ...state, phenomenonId: action.id };
    case "select-hypothesis":
      return { ...state, hypothesisId: action.id };
    case "set-sigma":
      return { ...state, sigma: action.value };
    case "set-symbol":
      return { ...state, observedSymbol: action.value };
    case "set-obs-range":
      return { ...state, obsFrom: action.from, obsTo: action.to };
    case "job-started":
      return { ...state, pendingJobs: [...state.pendingJobs, action.id] };
    case "job-finished": {
      const pendingJobs = state.pendingJobs.filter((j) => j !== action.id);
      // conditioning jobs land the user on the ranked-predictions tab
      const tab =
        action.ok && action.op === "condition"
          ? "analytics-predictions"
          : state.tab;
      return { ...state, pendingJobs, tab };
    }
    case "notice":
      return { ...state, notice: action.text };
  }
}

export function replay(log: Action[], from: ViewState = initialState): ViewState {
  return log.reduce(reduce, from);
}

/** Append-only log wrapper used by the app shell. */
export class StateLog {
  state: ViewState = initialState;
  log: Action[] = [];

  dispatch(action: Action): ViewState {
    this.log.push(action);
    this.state = reduce(this.state, action);
    return this.state;
  }
}
