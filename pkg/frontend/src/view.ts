// Pure derivation of everything the board shows from a server view.
// No game rules here: moves shown are exactly the server's legal moves.

import type {
  Configuration,
  HistoryEntry,
  LegalMove,
  Move,
  SessionView,
} from './protocol.js';

export interface StackModel {
  symbols: string[]; // top symbol first (leftmost when rendered)
}

export interface ColumnModel {
  control: string;
  stacks: StackModel[]; // top stack first
  empty: boolean;
}

export interface MoveButton {
  label: string;
  framed: boolean;
  move: LegalMove;
}

export interface HistoryRow {
  round: number;
  attack: string;
  response: string;
  canUndoTo: boolean;
}

export interface BoardModel {
  left: ColumnModel;
  right: ColumnModel;
  equal: boolean;
  phase: string;
  round: number;
  statusLine: string;
  banner: string | null; // game end or equality hint
  moves: MoveButton[];
  waitingForEngine: boolean;
  finished: boolean;
  history: HistoryRow[];
  pendingLabel: string | null;
}

export function configColumn(c: Configuration): ColumnModel {
  return {
    control: c.control,
    stacks: c.stacks.map((s) => ({ symbols: [...s] })),
    empty: c.stacks.length === 0,
  };
}

export function renderConfig(c: Configuration): string {
  if (c.stacks.length === 0) return `${c.control} (empty)`;
  return c.control + c.stacks.map((s) => `[${s.join(' ')}]`).join('');
}

export function moveLabel(m: Move): string {
  return `${m.side} ${m.action} → ${renderConfig(m.target)}`;
}

function equalSides(view: SessionView): boolean {
  return JSON.stringify(view.position.left) === JSON.stringify(view.position.right);
}

function resultText(view: SessionView): string | null {
  const r = view.result;
  if (!r) return null;
  const who = r.winner === view.role ? `you (${r.winner})` : `the engine (${r.winner})`;
  const why = {
    'attacker-stuck': 'the attacker has no move',
    'defender-stuck': 'the defender has no matching response',
    'round-cap': 'the round cap was reached (a bounded defender win)',
    defect: 'an illegal move was attempted',
  }[r.reason];
  return `${who} won in round ${r.round}: ${why}`;
}

export function deriveBoard(view: SessionView): BoardModel {
  const equal = equalSides(view);
  let banner = resultText(view);
  if (!banner && equal) {
    banner = 'equality installed: both sides are identical, a safe defender haven';
  }
  const statusLine = view.result
    ? 'game over'
    : view.yourTurn
      ? view.pending
        ? `respond on the ${view.pending.side === 'left' ? 'right' : 'left'} with action "${view.pending.action}"`
        : 'your move, attacker: pick either side'
      : 'engine is thinking';
  return {
    left: configColumn(view.position.left),
    right: configColumn(view.position.right),
    equal,
    phase: view.phase,
    round: view.round,
    statusLine,
    banner,
    moves: view.legalMoves.map((m) => ({ label: moveLabel(m), framed: m.framed, move: m })),
    waitingForEngine: !view.yourTurn && !view.result,
    finished: view.result !== null,
    history: view.history.map((h: HistoryEntry, i: number) => ({
      round: i + 1,
      attack: moveLabel(h.attack),
      response: h.response ? moveLabel(h.response) : '(stuck)',
      canUndoTo: true,
    })),
    pendingLabel: view.pending ? moveLabel(view.pending) : null,
  };
}
