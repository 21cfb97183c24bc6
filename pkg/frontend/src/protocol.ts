// Types mirroring the server's JSON shapes (see ../protocol.md).
// The server is authoritative: the client never computes game rules.

export interface Configuration {
  control: string;
  stacks: string[][]; // top stack first, top symbol first; [] = empty configuration
}

export interface Position {
  left: Configuration;
  right: Configuration;
}

export type Side = 'left' | 'right';

export interface Move {
  side: Side;
  action: string;
  target: Configuration;
}

export interface LegalMove extends Move {
  framed: boolean;
}

export type Role = 'attacker' | 'defender';

export interface GameResult {
  winner: Role;
  reason: 'attacker-stuck' | 'defender-stuck' | 'round-cap' | 'defect';
  round: number;
}

export interface HistoryEntry {
  position: Position;
  attack: Move;
  response: Move | null;
}

export interface SessionView {
  id: string;
  role: Role;
  opponent: string;
  order: 1 | 2;
  position: Position;
  round: number;
  turn: Role;
  pending: Move | null;
  yourTurn: boolean;
  legalMoves: LegalMove[];
  phase: 'generating' | 'switching' | 'verification';
  result: GameResult | null;
  maxRounds: number;
  history: HistoryEntry[];
  start: Position;
}

export interface SessionOptions {
  instance: string[][];
  order: 1 | 2;
  style?: 'eps' | 'schema';
  normed?: boolean;
  role: Role;
  opponent: string;
  oracle?: string;
  seed?: number;
  max_rounds?: number;
}

export const PRESET_INSTANCES: Record<string, string[][]> = {
  'e1 (solvable: A/AA)': [['A', 'AA']],
  'e2 (Thue-Morse solution: A/AB, B/BA)': [
    ['A', 'AB'],
    ['B', 'BA'],
  ],
  'nosol (no solution: A/AAB, AB/BA)': [
    ['A', 'AAB'],
    ['AB', 'BA'],
  ],
};
