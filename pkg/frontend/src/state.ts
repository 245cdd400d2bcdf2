// Client-side session state derived purely from the event stream.
//
// Nothing here mutates engine state; entries render in event-stream order
// (user echoes slot in just before the turn they triggered).

import type {
  AdaptationPayload,
  EngineEvent,
  MessagePayload,
  SnapshotPayload,
} from './types.js';

export interface ConversationEntry {
  sortKey: number;
  eventIndex: number | null;
  kind: 'agentMessage' | 'adaptationBadge' | 'stageLabel' | 'userMessage' | 'submission';
  text: string;
  banner?: string;
  warning?: boolean;
  error?: boolean;
}

export interface SnapshotRef {
  eventIndex: number;
  payload: SnapshotPayload;
}

export interface PendingProposal {
  kind: 'confirmSelection' | 'backtrack';
  eventIndex: number;
  optionId?: string;
  label?: string;
  targetStage?: string;
}

export interface AppState {
  events: EngineEvent[];
  lastIndex: number;
  conversation: ConversationEntry[];
  snapshots: SnapshotRef[];
  submitted: boolean;
  bannerLog: string[];
}

export function initialState(): AppState {
  return {
    events: [],
    lastIndex: -1,
    conversation: [],
    snapshots: [],
    submitted: false,
    bannerLog: [],
  };
}

export function reduceEvent(state: AppState, event: EngineEvent): AppState {
  if (event.index <= state.lastIndex) {
    return state; // duplicate from a reconnect replay
  }
  const next: AppState = {
    ...state,
    events: [...state.events, event],
    lastIndex: event.index,
    conversation: [...state.conversation],
    snapshots: [...state.snapshots],
    bannerLog: [...state.bannerLog],
  };
  switch (event.kind) {
    case 'message': {
      const payload = event.payload as unknown as MessagePayload;
      next.conversation.push({
        sortKey: event.index,
        eventIndex: event.index,
        kind: 'agentMessage',
        text: payload.text,
        warning: Boolean(payload.warning),
        error: Boolean(payload.error),
      });
      break;
    }
    case 'adaptation': {
      const payload = event.payload as unknown as AdaptationPayload;
      next.conversation.push({
        sortKey: event.index,
        eventIndex: event.index,
        kind: 'adaptationBadge',
        text: payload.banner,
        banner: payload.banner,
      });
      next.bannerLog.push(payload.banner);
      break;
    }
    case 'guiSnapshot':
      next.snapshots.push({
        eventIndex: event.index,
        payload: event.payload as unknown as SnapshotPayload,
      });
      break;
    case 'stageTransition': {
      const to = String(event.payload.to ?? '');
      next.conversation.push({
        sortKey: event.index,
        eventIndex: event.index,
        kind: 'stageLabel',
        text: to,
      });
      break;
    }
    case 'submission':
      next.submitted = true;
      next.conversation.push({
        sortKey: event.index,
        eventIndex: event.index,
        kind: 'submission',
        text: 'Booking submitted',
      });
      break;
    default:
      break; // confirmationAsk / backtrackProposal render as affordances
  }
  return next;
}

/** Echo the user's own input just before the events of the turn it caused. */
export function addUserEcho(state: AppState, text: string, firstEventIndex: number): AppState {
  return {
    ...state,
    conversation: [
      ...state.conversation,
      {
        sortKey: firstEventIndex - 0.5,
        eventIndex: null,
        kind: 'userMessage',
        text,
      },
    ],
  };
}

export function orderedConversation(state: AppState): ConversationEntry[] {
  return [...state.conversation].sort((a, b) => a.sortKey - b.sortKey);
}

/**
 * The affordance to show, if any: the latest proposal event with no later
 * turn activity after it (any later event means the turn moved on).
 */
export function pendingProposal(state: AppState): PendingProposal | null {
  for (let i = state.events.length - 1; i >= 0; i -= 1) {
    const event = state.events[i];
    if (event.kind === 'confirmationAsk') {
      return {
        kind: 'confirmSelection',
        eventIndex: event.index,
        optionId: String(event.payload.optionId),
        label: String(event.payload.label ?? event.payload.optionId),
      };
    }
    if (event.kind === 'backtrackProposal') {
      return {
        kind: 'backtrack',
        eventIndex: event.index,
        targetStage: String(event.payload.targetStageId),
      };
    }
    if (event.kind === 'message' || event.kind === 'stageTransition'
        || event.kind === 'submission') {
      return null;
    }
  }
  return null;
}

export function liveSnapshot(state: AppState): SnapshotRef | null {
  return state.snapshots.length ? state.snapshots[state.snapshots.length - 1] : null;
}
