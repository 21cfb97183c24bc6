// Protocol conformance against the real server: a full game on each bundled
// instance, legal-move mirroring, and 409 reason rendering.

import { spawn, type ChildProcess } from 'node:child_process';
import { createInterface } from 'node:readline';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiError, SessionClient } from '../src/client.js';
import type { LegalMove, SessionView } from '../src/protocol.js';
import { deriveBoard } from '../src/view.js';

let server: ChildProcess;
let client: SessionClient;

beforeAll(async () => {
  server = spawn('python3', ['-m', 'pdbisim.cli', 'serve', '--port', '0'], {
    stdio: ['ignore', 'pipe', 'inherit'],
  });
  const port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error('server did not start')), 15_000);
    createInterface({ input: server.stdout! }).once('line', (line) => {
      clearTimeout(timer);
      resolve((JSON.parse(line) as { port: number }).port);
    });
    server.once('exit', (code) => reject(new Error(`server exited: ${code}`)));
  });
  client = new SessionClient(`http://127.0.0.1:${port}`);
}, 20_000);

afterAll(() => {
  server?.kill();
});

/** The board must display exactly the server's list. */
function expectMirroredMoves(view: SessionView): void {
  const board = deriveBoard(view);
  expect(board.moves.map((m) => m.move)).toEqual(view.legalMoves);
}

function pick(view: SessionView, want: (m: LegalMove) => boolean): LegalMove {
  const found = view.legalMoves.find(want);
  expect(found, `no move matching predicate among ${JSON.stringify(view.legalMoves)}`).toBeDefined();
  return found!;
}

describe('human as attacker on e1 (forcing defender)', () => {
  it('plays a complete game: generate, switch, verify, defender survives', async () => {
    let view = await client.createSession({
      instance: [['A', 'AA']],
      order: 1,
      style: 'eps',
      role: 'attacker',
      opponent: 'forcing',
      oracle: '1',
      seed: 0,
      max_rounds: 50,
    });
    expect(view.position.left.control).toBe('q0');
    expect(view.position.right.control).toBe("q'0");
    expect(view.phase).toBe('generating');
    expectMirroredMoves(view);

    // one generating exchange: g to t, then the forced a1
    view = await client.submitMove(view.id, strip(pick(view, (m) => m.action === 'g' && !m.framed)));
    expectMirroredMoves(view);
    view = await client.submitMove(view.id, strip(pick(view, (m) => m.action === 'a1')));
    expect(view.position.left.stacks[0]).toEqual(['I1', 'I1', '⊥']);
    expectMirroredMoves(view);

    // switch: the defender erases and installs her suffix; verification is forced
    view = await client.submitMove(
      view.id,
      strip(pick(view, (m) => m.action === 's' && m.target.control === 'q_u')),
    );
    expect(view.phase).toBe('verification');
    while (view.result === null) {
      expectMirroredMoves(view);
      expect(view.yourTurn).toBe(true);
      view = await client.submitMove(view.id, strip(view.legalMoves[0]!));
    }
    // strings match (the oracle is genuine), so the attacker ends up stuck
    expect(view.result!.winner).toBe('defender');
    expect(view.result!.reason).toBe('attacker-stuck');
    const board = deriveBoard(view);
    expect(board.finished).toBe(true);
    expect(board.banner).toMatch(/won in round/);
  }, 30_000);

  it('renders the framed punishment as an equal pair', async () => {
    let view = await client.createSession({
      instance: [['A', 'AA']],
      order: 1,
      style: 'eps',
      role: 'attacker',
      opponent: 'forcing',
      oracle: '1',
      seed: 0,
    });
    view = await client.submitMove(view.id, strip(pick(view, (m) => m.framed && m.action === 'g')));
    const board = deriveBoard(view);
    expect(board.equal).toBe(true);
    expect(board.banner).toMatch(/equality installed/);
  }, 30_000);

  it('undo forks back to the initial board', async () => {
    let view = await client.createSession({
      instance: [['A', 'AA']],
      order: 1,
      role: 'attacker',
      opponent: 'forcing',
      oracle: '1',
    });
    const initial = view.position;
    view = await client.submitMove(view.id, strip(pick(view, (m) => m.action === 'g' && !m.framed)));
    expect(view.round).toBe(1);
    const fork = await client.fork(view.id, 0);
    expect(fork.id).not.toBe(view.id);
    expect(fork.position).toEqual(initial);
    expect(fork.round).toBe(0);
    // the two sessions diverge independently
    const again = await client.getSession(view.id);
    expect(again.round).toBe(1);
  }, 30_000);
});

describe('human as defender on e2 (switch attacker)', () => {
  it('loses by a verification mismatch after a dead index choice', async () => {
    let view = await client.createSession({
      instance: [
        ['A', 'AB'],
        ['B', 'BA'],
      ],
      order: 1,
      style: 'eps',
      role: 'defender',
      opponent: 'switch',
      seed: 0,
      max_rounds: 60,
    });
    expect(view.turn).toBe('defender');
    expect(view.pending).not.toBeNull();
    // pick index 1 twice: (1,1) is not a partial solution, the engine switches
    view = await client.submitMove(view.id, strip(pick(view, (m) => m.target.control === 'p1')));
    let guard = 0;
    while (view.result === null && guard++ < 60) {
      expectMirroredMoves(view);
      const onesFirst =
        view.legalMoves.find((m) => m.target.control === 'p1') ?? view.legalMoves[0]!;
      view = await client.submitMove(view.id, strip(onesFirst));
    }
    expect(view.result).not.toBeNull();
    expect(view.result!.winner).toBe('attacker');
    expect(view.result!.reason).toBe('defender-stuck');
    const lastAttack = view.history[view.history.length - 1]!.attack;
    expect(['a', 'b']).toContain(lastAttack.action); // the mismatch letter
  }, 30_000);
});

describe('error surfaces', () => {
  it('renders the 409 reason for an illegal submission', async () => {
    const view = await client.createSession({
      instance: [['A', 'AA']],
      order: 1,
      role: 'attacker',
      opponent: 'forcing',
      oracle: '1',
    });
    const bogus = {
      side: 'left' as const,
      action: 'g',
      target: { control: 'q_v', stacks: [['⊥']] },
    };
    let reason = '';
    try {
      await client.submitMove(view.id, bogus);
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(409);
      reason = (err as ApiError).reason;
    }
    expect(reason).toMatch(/not a successor/);
  }, 30_000);

  it('404s on unknown sessions and 400s on bad instances', async () => {
    await expect(client.getSession('nope')).rejects.toMatchObject({ status: 404 });
    await expect(
      client.createSession({
        instance: [['BA', 'A']],
        order: 1,
        role: 'attacker',
        opponent: 'random',
      }),
    ).rejects.toMatchObject({ status: 400 });
  }, 30_000);
});

function strip(m: LegalMove): { side: 'left' | 'right'; action: string; target: LegalMove['target'] } {
  const { framed: _framed, ...move } = m;
  return move;
}
