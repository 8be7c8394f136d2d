// Wire shapes mirrored from the session service. The console renders these
// payloads verbatim; it never computes metrics client-side.

export interface SessionHandle {
  session_id: string;
  case_id: string;
  status: "open" | "concluded" | "aborted";
  turn: number;
}

export interface Utterance {
  role: string;
  text: string;
  terminal_mark: "period" | "question";
  boundary_prob: number;
  start_seq: number;
  end_seq: number;
}

export interface StateEvent {
  field_id: string;
  value: string;
  polarity: "asserted" | "negated";
  temporal: string | null;
  source_turn: number;
  source_span: [number, number];
  confidence: number;
}

export interface BeliefSnapshot {
  raw: number[];
  fused: number[];
  smoothed: number[];
  temperature: number;
}

export interface Gap {
  kind: string;
  target: string;
  priority: number;
}

export interface Candidate {
  action_id: string;
  kind: string;
  target: string | null;
  prompt_text: string;
  eig: number;
  h_bar: number;
  v: number;
}

export interface Anchor {
  document_id: string;
  page_no: number;
  block_id: string;
  span: [number, number];
}

export interface SelectedAction {
  action_id: string;
  kind: string;
  target: string | null;
  prompt_text: string;
  eig: number | null;
  anchors: Anchor[];
}

export interface RetrievalHit {
  object_id: string;
  score: number;
  anchor: Anchor;
}

export interface TurnUpdate {
  turn: number;
  role: string;
  text: string;
  utterances: Utterance[];
  events: StateEvent[];
  belief: BeliefSnapshot;
  gaps: Gap[];
  candidates: Candidate[];
  selected_action: SelectedAction | null;
  retrieval: RetrievalHit[];
  session?: SessionHandle;
}

export interface SlotValue {
  value: string;
  polarity: string;
  temporal: string | null;
  source_turn: number;
}

export interface Snapshot {
  session: SessionHandle;
  state: Record<string, SlotValue>;
  belief: number[];
  gaps: Gap[];
  report: ReportDoc;
}

export interface ReportDoc {
  case_id: string;
  generated_at_turn: number;
  slot_values: Record<string, unknown>;
  risk_items: Array<Record<string, unknown>>;
  narrative_sections: Array<[string, string]>;
}

export interface TraceRecord {
  seq: number;
  turn: number;
  record_kind: string;
  payload: Record<string, unknown>;
  anchors?: Anchor[];
}

export interface ServiceError {
  code: string;
  message: string;
  detail: unknown;
}
