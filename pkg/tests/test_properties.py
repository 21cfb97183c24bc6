"""Property tests over randomly generated systems and instances."""

from hypothesis import given, settings, strategies as st

from pdbisim import (
    EPSILON,
    ResourceLimitError,
    Action,
    GamePosition,
    PushdownSystem,
    Rule,
    SystemLts,
    collapsed_successors,
    compute_switch_choice,
    config,
    decide_game,
    is_partial_solution,
    parse_pds,
    reachable,
    render_pds,
    successors,
    validate_instance,
)
from pdbisim.codec import PdsDocument
from pdbisim.pcp import concat_u, concat_v, reverse

CONTROLS = ["p", "q", "r"]
SYMBOLS = ["X", "Y", "Z"]
ACTIONS = [Action("a"), Action("b")]

controls = st.sampled_from(CONTROLS)
symbols = st.sampled_from(SYMBOLS)
actions = st.sampled_from(ACTIONS)
alphas = st.lists(symbols, max_size=2).map(tuple)


def rule_strategies(order: int, allow_eps: bool):
    acts = st.sampled_from(ACTIONS + [EPSILON]) if allow_eps else actions
    rewrite = st.builds(Rule.rewrite, controls, symbols, acts, controls, alphas)
    wild = st.builds(Rule.wild, controls, acts, controls, alphas)
    kinds = [rewrite, wild]
    if order == 2:
        kinds.append(st.builds(Rule.push, controls, symbols, actions, controls))
        kinds.append(st.builds(Rule.pop, controls, symbols, actions, controls))
    return st.one_of(kinds)


def system_strategy(order: int, allow_eps: bool = False):
    return st.lists(rule_strategies(order, allow_eps), min_size=1, max_size=6).map(
        lambda rules: PushdownSystem.from_rules(
            order, rules, controls=CONTROLS, gamma=SYMBOLS, actions=ACTIONS
        )
    )


def config_strategy(order: int):
    stack = st.lists(symbols, min_size=1, max_size=3).map(tuple)
    n_stacks = st.integers(0, 1 if order == 1 else 2)
    return st.tuples(controls, n_stacks, st.lists(stack, min_size=2, max_size=2)).map(
        lambda t: config(t[0], *t[2][: t[1]])
    )


@given(system_strategy(2), config_strategy(2))
@settings(max_examples=120)
def test_collapsed_equals_plain_without_silent_rules(sys, c):
    assert set(collapsed_successors(sys, c)) == set(successors(sys, c))


@given(system_strategy(2, allow_eps=True), config_strategy(2))
@settings(max_examples=120)
def test_operations_preserve_nonempty_inner_stacks(sys, c):
    try:
        out = collapsed_successors(sys, c, closure_budget=400)
    except ResourceLimitError:
        out = []  # unbounded silent growth is allowed to bail out
    for _, t in out:
        assert all(st_ for st_ in t.stacks)
    assert successors(sys, c) == successors(sys, c)


@given(system_strategy(2), config_strategy(2))
@settings(max_examples=60)
def test_reachable_monotone_in_depth(sys, c):
    prev = frozenset()
    for depth in range(4):
        space, _ = reachable(sys, c, depth, 2000)
        assert prev <= space
        prev = space


@given(system_strategy(2), config_strategy(2), config_strategy(2), st.integers(0, 4))
@settings(max_examples=60, deadline=None)
def test_decide_game_symmetric_and_monotone(sys, c1, c2, k):
    lts = SystemLts(sys)
    pos = GamePosition(c1, c2)
    v = decide_game(lts, pos, k)
    flipped = decide_game(lts, GamePosition(c2, c1), k)
    assert v.kind == flipped.kind and v.depth == flipped.depth
    deeper = decide_game(lts, pos, k + 1)
    if v.attacker_wins:
        assert deeper.attacker_wins and deeper.depth <= k
    if not deeper.attacker_wins:
        assert not v.attacker_wins


@given(system_strategy(2, allow_eps=True), config_strategy(2), config_strategy(2))
@settings(max_examples=40, deadline=None)
def test_equality_shortcircuit_is_conservative(sys, c1, c2):
    lts = SystemLts(sys, closure_budget=400)
    pos = GamePosition(c1, c2)
    try:
        fast = decide_game(lts, pos, 5, equality_shortcircuit=True, node_budget=20_000)
        slow = decide_game(lts, pos, 5, equality_shortcircuit=False, node_budget=20_000)
    except ResourceLimitError:
        return  # a budget bail-out is allowed; never a wrong verdict
    assert fast.kind == slow.kind


@given(system_strategy(2, allow_eps=True))
@settings(max_examples=80)
def test_codec_round_trip(sys):
    doc = PdsDocument(sys)
    text = render_pds(doc)
    again = parse_pds(text)
    assert again.system.rules == sys.rules
    assert render_pds(again) == text


word = st.text(alphabet="AB", min_size=1, max_size=3)


@st.composite
def instance_and_partial(draw):
    n = draw(st.integers(1, 3))
    pairs = []
    for _ in range(n):
        v = draw(word)
        u = draw(st.one_of(st.just(v[: draw(st.integers(1, len(v)))]),
                           word.filter(lambda w, v=v: len(w) <= len(v))))
        pairs.append((u, v))
    inst = validate_instance(pairs)
    seq = (1,)
    if not is_partial_solution(inst, seq):
        return None
    for _ in range(draw(st.integers(0, 4))):
        exts = [seq + (i,) for i in inst.indices() if is_partial_solution(inst, seq + (i,))]
        if not exts:
            break
        seq = exts[draw(st.integers(0, len(exts) - 1))]
    return inst, seq


@given(instance_and_partial())
@settings(max_examples=200)
def test_switch_choice_postconditions(case):
    if case is None:
        return
    inst, seq = case
    m, w = compute_switch_choice(inst, seq)
    assert 0 <= m < len(seq)
    assert reverse(inst.v(seq[m])).endswith(w)
    assert reverse(concat_u(inst, seq)) == w + reverse(concat_v(inst, seq[:m]))


@given(
    st.lists(st.lists(symbols, min_size=1, max_size=3).map(tuple), min_size=1, max_size=2),
    symbols,
)
@settings(max_examples=120)
def test_push_then_pop_restores_the_stacks(tails, top):
    sys = PushdownSystem.from_rules(
        2,
        [Rule.push("p", top, Action("a"), "q"), Rule.pop("q", top, Action("b"), "p")],
        gamma=SYMBOLS,
    )
    c = config("p", *(((top,) + tails[0]),) , *tails[1:])
    [(_, pushed)] = successors(sys, c)
    popped = [t for act, t in successors(sys, pushed) if act == Action("b")]
    assert popped == [c]


@given(system_strategy(2), config_strategy(2), config_strategy(2))
@settings(max_examples=40, deadline=None)
def test_every_win_ships_a_verifiable_certificate(sys, c1, c2):
    from pdbisim import verify_certificate

    lts = SystemLts(sys)
    pos = GamePosition(c1, c2)
    v = decide_game(lts, pos, 4)
    if v.attacker_wins:
        assert v.certificate is not None
        assert verify_certificate(lts, pos, v.certificate)
