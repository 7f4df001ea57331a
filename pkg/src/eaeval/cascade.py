"""The three-level matching cascade over one evaluation slot.

Level 1 pairs equal normalized strings, level 2 pairs residuals whose
similarity exceeds the threshold, level 3 sends the remaining cross pairs to
a judge. Only arguments unmatched at a level are carried forward, and each
argument is counted at most once across the six ledger counters.
"""

from dataclasses import dataclass

from .errors import ProviderFailure
from .model import EvaluationSlot, MatchLevel
from .providers.base import PairContext, VERDICT_MATCH, VERDICT_UNRESOLVED


@dataclass(frozen=True)
class MatchPair:
    """One matched (predicted, gold) pair; indices point into the slot lists."""

    level: MatchLevel
    predicted_index: int
    gold_index: int
    evidence: object = None  # RM: similarity score; CM: verdict id; EM: None


@dataclass(frozen=True)
class SlotLedger:
    """All counts and pairs produced by the cascade for one slot."""

    slot: EvaluationSlot
    pairs: tuple  # tuple[MatchPair, ...]
    np_e: int
    ng_e: int
    np_r: int
    ng_r: int
    np_c: int
    ng_c: int
    p_total: int
    g_total: int
    judge_calls: int
    baseline_judge_calls: int   # |P| * |G|, the judge-only comparison base
    post_em_pair_count: int     # cross pairs left after level 1, the other reading
    unresolved: tuple = ()      # (predicted_index, gold_index) the judge never resolved


def exact_match(slot: EvaluationSlot):
    """Greedy one-to-one pairing of equal normalized strings, in list order.

    Returns (pairs, np_e, ng_e, residual_p, residual_g) where the residual
    lists hold the indices of unpaired arguments in original order.
    """
    pairs = []
    taken_gold = set()
    matched_pred = set()
    for p in slot.predicted:
        for g in slot.gold:
            if g.slot_index in taken_gold:
                continue
            if p.normalized == g.normalized:
                pairs.append(MatchPair(level=MatchLevel.EM,
                                       predicted_index=p.slot_index,
                                       gold_index=g.slot_index))
                taken_gold.add(g.slot_index)
                matched_pred.add(p.slot_index)
                break
    residual_p = [p.slot_index for p in slot.predicted if p.slot_index not in matched_pred]
    residual_g = [g.slot_index for g in slot.gold if g.slot_index not in taken_gold]
    return pairs, len(pairs), len(pairs), residual_p, residual_g


def relaxed_match(slot: EvaluationSlot, residual_p, residual_g, provider,
                  threshold: float):
    """Pair residuals whose similarity strictly exceeds the threshold.

    Many-to-many: an argument may appear in several pairs, but the counts
    are distinct arguments per side. Any argument in at least one pair is
    dropped from the carried-forward residuals.
    """
    pairs = []
    matched_p, matched_g = set(), set()
    for pi in residual_p:
        for gi in residual_g:
            p, g = slot.predicted[pi], slot.gold[gi]
            try:
                score = provider.similarity(p.normalized, g.normalized)
            except Exception as exc:  # noqa: BLE001 - identify the failing pair
                raise ProviderFailure((p.raw, g.raw), exc) from exc
            if score > threshold:
                pairs.append(MatchPair(level=MatchLevel.RM, predicted_index=pi,
                                       gold_index=gi, evidence=score))
                matched_p.add(pi)
                matched_g.add(gi)
    residual_p2 = [pi for pi in residual_p if pi not in matched_p]
    residual_g2 = [gi for gi in residual_g if gi not in matched_g]
    return pairs, len(matched_p), len(matched_g), residual_p2, residual_g2


def _pair_context(slot: EvaluationSlot, pi: int, gi: int) -> PairContext:
    p, g = slot.predicted[pi], slot.gold[gi]
    return PairContext(doc_id=slot.doc_id, role=slot.role,
                       document=slot.context.text, event_type=slot.context.event_type,
                       gold=g.raw, predicted=p.raw,
                       gold_norm=g.normalized, predicted_norm=p.normalized,
                       question=slot.context.question)


def complex_match(slot: EvaluationSlot, residual_p, residual_g, judge,
                  short_circuit: bool = False):
    """Submit remaining cross pairs to the judge; count matched arguments.

    Every cross pair is submitted exactly once (the judge's cache deduplicates
    repeated string pairs). With short_circuit a pair is skipped when both of
    its arguments already matched; that cannot change the counts, only the
    pair list and call count. Unresolved verdicts count as non-match and are
    reported separately.
    """
    pairs = []
    matched_p, matched_g = set(), set()
    unresolved = []
    judge_calls = 0
    for pi in residual_p:
        for gi in residual_g:
            if short_circuit and pi in matched_p and gi in matched_g:
                continue
            verdict = judge.judge_pair(_pair_context(slot, pi, gi))
            if not verdict.cached:
                judge_calls += 1
            if verdict.verdict == VERDICT_MATCH:
                pairs.append(MatchPair(level=MatchLevel.CM, predicted_index=pi,
                                       gold_index=gi, evidence=verdict.verdict_id))
                matched_p.add(pi)
                matched_g.add(gi)
            elif verdict.verdict == VERDICT_UNRESOLVED:
                unresolved.append((pi, gi))
    return pairs, len(matched_p), len(matched_g), judge_calls, unresolved


def run_cascade(slot: EvaluationSlot, similarity, judge, threshold: float = 0.85,
                short_circuit: bool = False) -> SlotLedger:
    """Run all three levels on one slot and assemble its ledger.

    Pair lists are sorted by (predicted_index, gold_index) within each level,
    so the ledger is deterministic however the work was scheduled.
    """
    em_pairs, np_e, ng_e, res_p, res_g = exact_match(slot)
    post_em_pair_count = len(res_p) * len(res_g)
    rm_pairs, np_r, ng_r, res_p, res_g = relaxed_match(
        slot, res_p, res_g, similarity, threshold)
    cm_pairs, np_c, ng_c, judge_calls, unresolved = complex_match(
        slot, res_p, res_g, judge, short_circuit=short_circuit)

    order = lambda pair: (pair.predicted_index, pair.gold_index)  # noqa: E731
    pairs = tuple(sorted(em_pairs, key=order) + sorted(rm_pairs, key=order)
                  + sorted(cm_pairs, key=order))
    return SlotLedger(
        slot=slot, pairs=pairs,
        np_e=np_e, ng_e=ng_e, np_r=np_r, ng_r=ng_r, np_c=np_c, ng_c=ng_c,
        p_total=len(slot.predicted), g_total=len(slot.gold),
        judge_calls=judge_calls,
        baseline_judge_calls=len(slot.predicted) * len(slot.gold),
        post_em_pair_count=post_em_pair_count,
        unresolved=tuple(sorted(unresolved)),
    )
