// Wire types mirroring the session server's event payloads.

export type EventKind =
  | 'message'
  | 'adaptation'
  | 'guiSnapshot'
  | 'confirmationAsk'
  | 'backtrackProposal'
  | 'stageTransition'
  | 'submission';

export interface EngineEvent {
  index: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface AdaptationPayload {
  kind: 'augment' | 'filter' | 'sort' | 'highlight';
  params: Record<string, unknown>;
  linkedPreferenceIds: string[];
  banner: string;
}

export interface ViewPayload {
  visible: string[];
  labels: Record<string, string>;
  highlighted: string[];
  hiddenCount: number;
  showAllEngaged: boolean;
  nonMatching: string[];
  allOrdered: string[];
  appliedActions: AdaptationPayload[];
}

export interface SeatCell {
  id: string;
  row: string;
  column: number;
  tier: string;
  taken: boolean;
  back: boolean;
}

export interface BreadcrumbEntry {
  stage: string;
  label: string;
}

export interface SnapshotPayload {
  stage: string;
  uiKind: string;
  stageTitle: string;
  view: ViewPayload | null;
  breadcrumb: BreadcrumbEntry[];
  seatGrid?: SeatCell[];
}

export interface MessagePayload {
  text: string;
  error?: string;
  warning?: boolean;
  elicitation?: boolean;
  degraded?: boolean;
}

export interface ScenarioInfo {
  id: string;
  title: string;
  brief: string;
  stages: { id: string; title: string; uiKind: string }[];
}

export type GuiActionKind = 'select' | 'continue' | 'back' | 'showAll' | 'submit';

export interface GuiActionRequest {
  kind: GuiActionKind;
  params: { optionId?: string; targetStage?: string };
}
