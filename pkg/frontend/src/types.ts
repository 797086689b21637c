// Wire types for the trajectory service: GET /motions and the /ws stream.

export interface LimitsJson {
  y_min: number[];
  y_max: number[];
  delta_ydot: number[];
}

export interface MotionComponent {
  dc: number;
  cos: number[];
  sin: number[];
}

export interface MotionEntry {
  id: string;
  n: number;
  period: number;
  classification: string;
  components: MotionComponent[];
}

export interface MotionsResponse {
  limits: LimitsJson;
  motions: MotionEntry[];
}

export interface StateMessage {
  type: "state";
  t: number;
  phi: number;
  y: number[];
  ydot: number[];
  f: number[];
  motion: string;
  period: number;
  v3: number;
  dphi: number;
  gamma: number;
}

export interface AckMessage {
  type: "ack";
  seq: number | string;
}

export interface ErrMessage {
  type: "err";
  seq: number | string | null;
  reason: string;
}

export type ServerMessage = StateMessage | AckMessage | ErrMessage;

export type Command =
  | { type: "set_motion"; id: string; period?: number }
  | { type: "set_gamma"; value: number }
  | { type: "reset"; y0?: number[]; ydot0?: number[]; phi0?: number }
  | { type: "pause" }
  | { type: "resume" };
