"""Achievable rates of mixed noisy network coding and its special cases.

Every rate is a min/max over subsets of mutual-information terms evaluated on
the joint covariance built by ``gauss_core``. Destination terms use one
expression for every mode: for V^c ⊆ S ⊆ T ∪ V^c and S^c = T - S,

    R_T(S) = I(X X_S; Ŷ_{S^c} Y | X_{S^c}) - I(Ŷ_{S∩T}; Y_{S∩T} | X X_{T∪S} Ŷ_{S^c} Y)

which is the cooperative term when V^c ⊆ T and the partially cooperative one
when T ⊆ V.
"""

import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.optimize import SuperpositionGridOptimizer

from .exceptions import ConfigurationError, InfeasibleStrategyError
from .gauss_core import JointCovariance, assemble_covariance, conditional_mi
from .network_model import (
    MAX_ENUM_RELAYS,
    BetaSpec,
    build_input_covariance,
    build_layered_covariance,
    check_enumeration_cap,
    enumerate_ordered_partitions,
    enumerate_subsets,
)
from .pydantic_models import (
    CompressionConfig,
    GaussianNetwork,
    InputCovariance,
    RateResult,
    StrategyAssignment,
    format_set,
)

log = logging.getLogger(__name__)

# Υ membership: Q >= FEASIBILITY_TOL
FEASIBILITY_TOL = -1e-9
# differences below this are ties, first candidate wins
TIE_TOL = 1e-12


def _xs(nodes) -> List[str]:
    return [f"X{k}" for k in sorted(nodes)]


def _ys(nodes) -> List[str]:
    return [f"Y{k}" for k in sorted(nodes)]


def _yhs(nodes) -> List[str]:
    return [f"Yh{k}" for k in sorted(nodes)]


class RateTerms:
    """Mutual-information terms of one network covariance, with caching"""

    def __init__(self, cov: JointCovariance, strategy: StrategyAssignment):
        if cov.n_relays != strategy.n_relays:
            raise ConfigurationError("strategy and network disagree on the number of relays")
        self.cov = cov
        self.strategy = strategy
        self.nodes = strategy.nodes
        self.cf_set = strategy.cf_set
        self.df_set = strategy.df_set
        self.aux = list(cov.aux_labels)
        self._cache: Dict[tuple, float] = {}

    def mi(self, a: Iterable[str], b: Iterable[str], c: Iterable[str] = ()) -> float:
        a, b, c = tuple(a), tuple(b), tuple(c)
        key = (frozenset(a), frozenset(b), frozenset(c))
        if key not in self._cache:
            self._cache[key] = conditional_mi(self.cov, a, b, c)
        return self._cache[key]

    # destination

    def dest_rate(self, T: FrozenSet[int], S: FrozenSet[int]) -> float:
        sc = T - S
        shared = S & T
        first = self.mi(["X"] + _xs(S), _yhs(sc) + ["Y"], _xs(sc))
        second = self.mi(_yhs(shared), _ys(shared),
                         ["X"] + _xs(T | S) + _yhs(sc) + ["Y"])
        return first - second

    def dest_q(self, T: FrozenSet[int], S: FrozenSet[int]) -> float:
        """Q_T(S) of the cooperative schemes (conditioned on the auxiliaries)"""
        sc = T - S
        first = self.mi(_xs(S), _yhs(sc) + ["Y"], self.aux + ["X"] + _xs(sc))
        second = self.mi(_yhs(S), _ys(S), self.aux + ["X"] + _xs(T) + _yhs(sc) + ["Y"])
        return first - second

    def dest_q_restricted(self, T: FrozenSet[int], S: FrozenSet[int]) -> float:
        """Υ(V) term when the destination only decodes CF descriptions"""
        sc = T - S
        df = self.df_set
        first = self.mi(_xs(S), _yhs(sc) + ["Y"], ["X"] + _xs(sc | df))
        second = self.mi(_yhs(S), _ys(S), ["X"] + _xs(T | df) + _yhs(sc) + ["Y"])
        return first - second

    def dest_rate_fd(self, T: FrozenSet[int], S: FrozenSet[int]) -> float:
        sc = T - S
        return (self.mi(["X"], _yhs(T) + ["Y"], _xs(T))
                + self.mi(_xs(S), ["Y"], _xs(sc))
                - self.mi(_yhs(S), _ys(S), _xs(T) + _yhs(sc) + ["Y"]))

    def dest_q_fd(self, T: FrozenSet[int], S: FrozenSet[int]) -> float:
        sc = T - S
        return (self.mi(_xs(S), ["Y"], _xs(sc))
                - self.mi(_yhs(S), _ys(S), ["X"] + _xs(T) + _yhs(sc) + ["Y"]))

    # DF relays

    def relay_rate(self, k: int, Tk: FrozenSet[int], S: FrozenSet[int]) -> float:
        sc = Tk - S
        yk = f"Y{k}"
        return (self.mi(["X"], _yhs(Tk) + [yk], self.aux + _xs({k} | Tk))
                + self.mi(_xs(S), [yk], self.aux + _xs({k} | sc))
                - self.mi(_yhs(S), _ys(S), self.aux + _xs({k} | Tk) + _yhs(sc) + [yk]))

    def relay_q(self, k: int, Tk: FrozenSet[int], S: FrozenSet[int]) -> float:
        sc = Tk - S
        yk = f"Y{k}"
        return (self.mi(_xs(S), [yk], self.aux + _xs({k} | sc))
                - self.mi(_yhs(S), _ys(S), self.aux + ["X"] + _xs({k} | Tk) + _yhs(sc) + [yk]))

    def relay_rate_layered(self, k: int, Tk: FrozenSet[int], S: FrozenSet[int],
                           layering: Sequence[FrozenSet[int]]) -> float:
        """Relay term of a DF relay in layer t of an ordered layering.

        Auxiliaries of layers above t and the inputs of higher-layer relays are
        decoded together with the source message.
        """
        t = next(pos for pos, layer in enumerate(layering, start=1) if k in layer)
        aux_low, aux_high = self.aux[:t], self.aux[t:]
        low = frozenset().union(*layering[:t])
        high = frozenset().union(*layering[t:]) if t < len(layering) else frozenset()
        df = self.df_set
        sc = Tk - S
        yk = f"Y{k}"
        return (self.mi(["X"] + aux_high + _xs(high), _yhs(Tk) + [yk], aux_low + _xs(low | Tk))
                + self.mi(_xs(S), [yk], self.aux + _xs(df | sc))
                - self.mi(_yhs(S), _ys(S), self.aux + _xs(df | Tk) + _yhs(sc) + [yk]))

    def relay_q_layered(self, k: int, Tk: FrozenSet[int], S: FrozenSet[int]) -> float:
        df = self.df_set
        sc = Tk - S
        yk = f"Y{k}"
        return (self.mi(_xs(S), [yk], self.aux + _xs(df | sc))
                - self.mi(_yhs(S), _ys(S), self.aux + ["X"] + _xs(df | Tk) + _yhs(sc) + [yk]))


def _label(kind: str, T, S, k: Optional[int] = None) -> str:
    head = f"{kind}[k={k},T={format_set(T)}" if k is not None else f"{kind}[T={format_set(T)}"
    return f"{head},S={format_set(S)}]"


def _argmin(candidates, evaluate) -> Tuple[float, Optional[FrozenSet[int]]]:
    best, arg = math.inf, None
    for cand in candidates:
        value = evaluate(cand)
        if arg is None or value < best - TIE_TOL:
            best, arg = value, cand
    return best, arg


def _in_upsilon(q_fn, T: FrozenSet[int], breakdown: Dict[str, float], label_kind: str,
                k: Optional[int] = None) -> Tuple[bool, Optional[FrozenSet[int]], float]:
    """Check Q(S) >= tol for every S ⊆ T; return the first violating S"""
    for S in enumerate_subsets(T):
        if not S:
            continue
        value = q_fn(T, S)
        breakdown[_label(label_kind, T, S, k)] = value
        if value < FEASIBILITY_TOL:
            return False, S, value
    return True, None, 0.0


class _Evaluation:
    """Outcome of the destination and relay searches of one covariance"""

    def __init__(self):
        self.breakdown: Dict[str, float] = {}
        self.dest = math.inf
        self.dest_T: Optional[FrozenSet[int]] = None
        self.dest_S: Optional[FrozenSet[int]] = None
        self.relay = math.inf
        self.relay_k: Optional[int] = None
        self.relay_S: Optional[FrozenSet[int]] = None
        self.chosen_T_k: Dict[int, FrozenSet[int]] = {}

    @property
    def value(self) -> float:
        return min(self.dest, self.relay)


def _destination_search(terms: RateTerms, strategy: StrategyAssignment, ev: _Evaluation) -> None:
    nodes, df, cf = terms.nodes, terms.df_set, terms.cf_set
    mode = strategy.mode
    restricted = mode in ("partially_cooperative", "non_cooperative")
    if mode == "fully_cooperative":
        candidates = [nodes]
    elif strategy.dest_decode is not None:
        candidates = [strategy.dest_decode]
    elif restricted:
        candidates = enumerate_subsets(cf)
    else:
        candidates = enumerate_subsets(nodes)
    fixed = mode == "fully_cooperative" or strategy.dest_decode is not None

    for T in candidates:
        if restricted:
            ok, bad_S, bad_q = _in_upsilon(terms.dest_q_restricted, T, ev.breakdown, "Q")
        elif fixed:
            ok, bad_S, bad_q = _in_upsilon(terms.dest_q, T, ev.breakdown, "Q")
        else:
            ok = True
        if not ok:
            if fixed:
                raise InfeasibleStrategyError(
                    f"decode set T={format_set(T)} violates feasibility at S={format_set(bad_S)} (Q={bad_q:.6g})",
                    T=T, S=bad_S, value=bad_q)
            continue

        if restricted:
            cuts = enumerate_subsets(T)
            rate_of = lambda S, T=T: terms.dest_rate(T, S | df)
        else:
            cuts = enumerate_subsets(nodes, lower=df, upper=T | df)
            rate_of = lambda S, T=T: terms.dest_rate(T, S)

        def evaluate(S, T=T, rate_of=rate_of):
            value = rate_of(S)
            ev.breakdown[_label("R", T, S)] = value
            return value

        value, S = _argmin(cuts, evaluate)
        if ev.dest_T is None or value > ev.dest + TIE_TOL:
            ev.dest, ev.dest_T, ev.dest_S = value, T, S


def _relay_search(terms: RateTerms, strategy: StrategyAssignment, ev: _Evaluation,
                  layering: Optional[Sequence[FrozenSet[int]]] = None) -> None:
    nodes, cf = terms.nodes, terms.cf_set
    mode = strategy.mode
    restricted = mode in ("partially_cooperative", "non_cooperative")
    if restricted and layering is None:
        layering = (terms.df_set,) if terms.df_set else ()
    fixed_map = strategy.relay_decode or {}

    for k in sorted(terms.df_set):
        if mode == "fully_cooperative":
            candidates, fixed = [nodes - {k}], True
        elif k in fixed_map:
            candidates, fixed = [fixed_map[k]], True
        elif restricted:
            candidates, fixed = enumerate_subsets(cf), False
        else:
            candidates, fixed = enumerate_subsets(nodes - {k}), False

        if restricted:
            q_fn = lambda T, S, k=k: terms.relay_q_layered(k, T, S)
            rate_fn = lambda T, S, k=k: terms.relay_rate_layered(k, T, S, layering)
        else:
            q_fn = lambda T, S, k=k: terms.relay_q(k, T, S)
            rate_fn = lambda T, S, k=k: terms.relay_rate(k, T, S)

        best_val, best_T, best_S = -math.inf, None, None
        for Tk in candidates:
            ok, bad_S, bad_q = _in_upsilon(q_fn, Tk, ev.breakdown, "Qk", k)
            if not ok:
                if fixed:
                    raise InfeasibleStrategyError(
                        f"relay {k} decode set T={format_set(Tk)} violates feasibility "
                        f"at S={format_set(bad_S)} (Q={bad_q:.6g})",
                        T=Tk, S=bad_S, value=bad_q)
                continue

            def evaluate(S, Tk=Tk):
                value = rate_fn(Tk, S)
                ev.breakdown[_label("Rk", Tk, S, k)] = value
                return value

            value, S = _argmin(enumerate_subsets(Tk), evaluate)
            if best_T is None or value > best_val + TIE_TOL:
                best_val, best_T, best_S = value, Tk, S
        ev.chosen_T_k[k] = best_T
        if ev.relay_k is None or best_val < ev.relay - TIE_TOL:
            ev.relay, ev.relay_k, ev.relay_S = best_val, k, best_S


def _result(ev: _Evaluation, strategy: StrategyAssignment, scheme: str,
            layering=None, certificate=None) -> RateResult:
    raw = ev.value
    if ev.relay_k is not None and ev.relay < ev.dest - TIE_TOL:
        binding = ev.relay_S
        constraint = _label("Rk", ev.chosen_T_k[ev.relay_k], ev.relay_S, ev.relay_k)
    else:
        binding = ev.dest_S
        constraint = _label("R", ev.dest_T, ev.dest_S)
    cert = dict(certificate or {})
    cert.update({"destination": ev.dest, "relay": ev.relay, "binding_relay": ev.relay_k})
    return RateResult(
        rate=max(raw, 0.0),
        raw_rate=raw,
        binding_subset=binding if binding is not None else frozenset(),
        binding_constraint=constraint,
        chosen_T=ev.dest_T,
        chosen_T_k=dict(ev.chosen_T_k),
        chosen_V=strategy.cf_set,
        chosen_layering=tuple(layering) if layering is not None else None,
        term_breakdown=ev.breakdown,
        feasible=True,
        zero_rate=raw <= 0.0,
        scheme=scheme,
        certificate=cert,
    )


def _terms(network, inputs, compression, strategy) -> RateTerms:
    if strategy.n_relays != network.n_relays:
        raise ConfigurationError(
            f"strategy has {strategy.n_relays} relays, network has {network.n_relays}")
    return RateTerms(assemble_covariance(network, inputs, compression), strategy)


def r_term(network: GaussianNetwork, inputs: InputCovariance, compression: CompressionConfig,
           strategy: StrategyAssignment, S: Iterable[int]) -> float:
    """Destination term R_T(S) for the decode set ``strategy.dest_decode``"""
    S = frozenset(S)
    T = strategy.dest_decode
    if T is None:
        raise ConfigurationError("r_term needs strategy.dest_decode")
    terms = _terms(network, inputs, compression, strategy)
    if strategy.mode == "forward_decoding":
        if not S <= T:
            raise ConfigurationError("S must be a subset of T")
        return terms.dest_rate_fd(T, S)
    if strategy.mode in ("partially_cooperative", "non_cooperative"):
        if not S <= T:
            raise ConfigurationError("S must be a subset of T")
        return terms.dest_rate(T, S | strategy.df_set)
    if not (strategy.df_set <= S <= T | strategy.df_set):
        raise ConfigurationError("S must satisfy V^c ⊆ S ⊆ T ∪ V^c")
    return terms.dest_rate(T, S)


def q_term(network: GaussianNetwork, inputs: InputCovariance, compression: CompressionConfig,
           strategy: StrategyAssignment, S: Iterable[int], at_relay: Optional[int] = None) -> float:
    """Signed decodability term Q_T(S), or Q^(k) when ``at_relay`` is set"""
    S = frozenset(S)
    terms = _terms(network, inputs, compression, strategy)
    restricted = strategy.mode in ("partially_cooperative", "non_cooperative")
    if at_relay is None:
        T = strategy.dest_decode
        if T is None or not S <= T:
            raise ConfigurationError("q_term needs dest_decode containing S")
        if strategy.mode == "forward_decoding":
            return terms.dest_q_fd(T, S)
        return terms.dest_q_restricted(T, S) if restricted else terms.dest_q(T, S)
    k = at_relay
    Tk = (strategy.relay_decode or {}).get(k)
    if k not in strategy.df_set or Tk is None or not S <= Tk:
        raise ConfigurationError(f"q_term needs a DF relay {k} with relay_decode containing S")
    return terms.relay_q_layered(k, Tk, S) if restricted else terms.relay_q(k, Tk, S)


def relay_rate_term(network: GaussianNetwork, inputs: InputCovariance, compression: CompressionConfig,
                    strategy: StrategyAssignment, k: int, S: Iterable[int]) -> float:
    """Decoding term R^(k)_{T_k}(S) of DF relay k"""
    S = frozenset(S)
    Tk = (strategy.relay_decode or {}).get(k, frozenset())
    if k not in strategy.df_set or not S <= Tk:
        raise ConfigurationError(f"relay {k} must be DF and S must be within its decode set")
    terms = _terms(network, inputs, compression, strategy)
    if strategy.mode in ("partially_cooperative", "non_cooperative"):
        layering = strategy.layering or (strategy.df_set,)
        return terms.relay_rate_layered(k, Tk, S, layering)
    return terms.relay_rate(k, Tk, S)


def rate_mnnc(network: GaussianNetwork, inputs: InputCovariance, compression: CompressionConfig,
              strategy: StrategyAssignment, enum_cap: int = MAX_ENUM_RELAYS) -> RateResult:
    """Mixed noisy network coding rate for the CF set ``strategy.cf_set``.

    ``general`` searches every destination decode set and the feasible relay
    decode sets; ``fully_cooperative`` fixes T = N and T_k = N - {k} and
    enforces their feasibility; ``partially_cooperative`` restricts all decode
    sets to CF relays.
    """
    check_enumeration_cap(network.n_relays, enum_cap)
    if strategy.mode == "non_cooperative":
        return rate_noncoop(network, inputs, compression, strategy.cf_set, enum_cap=enum_cap)
    if strategy.mode == "forward_decoding":
        return rate_fd_nnc(network, inputs, compression, enum_cap=enum_cap)
    terms = _terms(network, inputs, compression, strategy)
    ev = _Evaluation()
    _destination_search(terms, strategy, ev)
    _relay_search(terms, strategy, ev)
    result = _result(ev, strategy, scheme=f"mnnc:{strategy.mode}")
    log.debug("mnnc V=%s rate=%.6f via %s", format_set(strategy.cf_set),
              result.rate, result.binding_constraint)
    return result


def _check_independent(inputs: InputCovariance) -> None:
    sigma = inputs.matrix
    off = sigma - np.diag(np.diag(sigma))
    if np.max(np.abs(off), initial=0.0) > 1e-12 * max(1.0, float(np.max(np.abs(sigma)))):
        raise ConfigurationError("inputs must be independent across nodes",
                                 [("inputs.sigma", "off-diagonal entries must be 0")])


def rate_nnc(network: GaussianNetwork, inputs_independent: InputCovariance,
             compression: CompressionConfig, enum_cap: int = MAX_ENUM_RELAYS) -> RateResult:
    """Noisy network coding: max over T ⊆ N of min over S ⊆ T of R_T(S)"""
    check_enumeration_cap(network.n_relays, enum_cap)
    _check_independent(inputs_independent)
    cov = assemble_covariance(network, inputs_independent, compression)
    breakdown = {}
    best, best_T, best_S = -math.inf, None, None
    for T in enumerate_subsets(network.nodes):
        inner, inner_S = math.inf, None
        for S in enumerate_subsets(T):
            sc = T - S
            value = (conditional_mi(cov, ["X"] + _xs(S), _yhs(sc) + ["Y"], _xs(sc))
                     - conditional_mi(cov, _yhs(S), _ys(S), ["X"] + _xs(T) + _yhs(sc) + ["Y"]))
            breakdown[_label("R", T, S)] = value
            if inner_S is None or value < inner - TIE_TOL:
                inner, inner_S = value, S
        if best_T is None or inner > best + TIE_TOL:
            best, best_T, best_S = inner, T, inner_S
    return RateResult(
        rate=max(best, 0.0), raw_rate=best, binding_subset=best_S,
        binding_constraint=_label("R", best_T, best_S), chosen_T=best_T,
        chosen_V=network.nodes, term_breakdown=breakdown, zero_rate=best <= 0.0,
        scheme="nnc",
    )


def rate_fd_nnc(network: GaussianNetwork, inputs_independent: InputCovariance,
                compression: CompressionConfig, enum_cap: int = MAX_ENUM_RELAYS) -> RateResult:
    """Noisy network coding with forward decoding at the destination"""
    check_enumeration_cap(network.n_relays, enum_cap)
    _check_independent(inputs_independent)
    strategy = StrategyAssignment(n_relays=network.n_relays, cf_set=network.nodes,
                                  mode="forward_decoding")
    terms = _terms(network, inputs_independent, compression, strategy)
    ev = _Evaluation()
    for T in enumerate_subsets(network.nodes):
        ok, _, _ = _in_upsilon(terms.dest_q_fd, T, ev.breakdown, "Q")
        if not ok:
            continue

        def evaluate(S, T=T):
            value = terms.dest_rate_fd(T, S)
            ev.breakdown[_label("R", T, S)] = value
            return value

        value, S = _argmin(enumerate_subsets(T), evaluate)
        if ev.dest_T is None or value > ev.dest + TIE_TOL:
            ev.dest, ev.dest_T, ev.dest_S = value, T, S
    return _result(ev, strategy, scheme="fd_nnc")


def rate_noncoop(network: GaussianNetwork, inputs: InputCovariance, compression: CompressionConfig,
                 cf_set: Iterable[int], enum_cap: int = MAX_ENUM_RELAYS) -> RateResult:
    """Non-cooperative MNNC: DF relays decode from their own output only"""
    check_enumeration_cap(network.n_relays, enum_cap)
    strategy = StrategyAssignment(n_relays=network.n_relays, cf_set=frozenset(cf_set),
                                  mode="non_cooperative")
    terms = _terms(network, inputs, compression, strategy)
    df = strategy.df_set
    ev = _Evaluation()
    decode, decode_k = math.inf, None
    for i in sorted(df):
        value = terms.mi(["X"], [f"Y{i}"], _xs(df))
        ev.breakdown[f"DF[i={i}]"] = value
        if decode_k is None or value < decode - TIE_TOL:
            decode, decode_k = value, i
    for T in enumerate_subsets(strategy.cf_set):
        ok, _, _ = _in_upsilon(terms.dest_q_restricted, T, ev.breakdown, "Q")
        if not ok:
            continue

        def evaluate(S, T=T):
            value = terms.dest_rate(T, S | df)
            ev.breakdown[_label("R", T, S)] = value
            return value

        inner, S = _argmin(enumerate_subsets(T), evaluate)
        value = min(inner, decode)
        if ev.dest_T is None or value > min(ev.dest, decode) + TIE_TOL:
            ev.dest, ev.dest_T, ev.dest_S = inner, T, S
    ev.relay, ev.relay_k, ev.relay_S = decode, decode_k, frozenset()
    if decode_k is not None:
        ev.chosen_T_k[decode_k] = frozenset()
    return _result(ev, strategy, scheme="noncoop")


def rate_lmnnc(network: GaussianNetwork, betas: BetaSpec, compression: CompressionConfig,
               cf_set: Iterable[int], layering: Optional[Sequence[Iterable[int]]] = None,
               max_layers: Optional[int] = None, enum_cap: int = MAX_ENUM_RELAYS) -> RateResult:
    """Layered MNNC; searches every ordered layering of the DF relays unless one is given"""
    check_enumeration_cap(network.n_relays, enum_cap)
    strategy = StrategyAssignment(n_relays=network.n_relays, cf_set=frozenset(cf_set),
                                  mode="partially_cooperative")
    if layering is not None:
        layerings = [tuple(frozenset(layer) for layer in layering)]
        StrategyAssignment(n_relays=network.n_relays, cf_set=strategy.cf_set,
                           layering=layerings[0], mode="partially_cooperative")
    else:
        layerings = enumerate_ordered_partitions(strategy.df_set, max_layers)

    best_ev, best_layering, per_layering = None, None, {}
    for lay in layerings:
        inputs = build_layered_covariance(network, strategy, lay, betas)
        terms = _terms(network, inputs, compression, strategy)
        ev = _Evaluation()
        _destination_search(terms, strategy, ev)
        _relay_search(terms, strategy, ev, layering=lay)
        per_layering[" ".join(format_set(layer) for layer in lay) or "{}"] = ev.value
        if best_ev is None or ev.value > best_ev.value + TIE_TOL:
            best_ev, best_layering = ev, lay
    return _result(best_ev, strategy, scheme="lmnnc", layering=best_layering,
                   certificate={"layerings": per_layering})


def rate_two_relay(network_n2: GaussianNetwork, inputs: InputCovariance,
                   compression: CompressionConfig) -> RateResult:
    """Two-relay bound with relay 1 running DF and relay 2 running CF.

    min{I(X;Y1|X1), max{I(XX1;Y), min[I(XX1;Ŷ2 Y|X2), I(XX1X2;Y) - I(Y2;Ŷ2|Y X X1 X2)]}}
    """
    if network_n2.n_relays != 2:
        raise ConfigurationError("rate_two_relay needs a two-relay network")
    sigma = inputs.matrix
    if abs(sigma[2, 0]) > 1e-12 or abs(sigma[2, 1]) > 1e-12:
        raise ConfigurationError("relay 2 input must be independent of the source and relay 1")
    cov = assemble_covariance(network_n2, inputs, compression)
    decode = conditional_mi(cov, ["X"], ["Y1"], ["X1"])
    interference = conditional_mi(cov, ["X", "X1"], ["Y"])
    described = conditional_mi(cov, ["X", "X1"], ["Yh2", "Y"], ["X2"])
    compress_cost = conditional_mi(cov, ["Y2"], ["Yh2"], ["Y", "X", "X1", "X2"])
    joint = conditional_mi(cov, ["X", "X1", "X2"], ["Y"]) - compress_cost
    relay_gain = conditional_mi(cov, ["X2"], ["Y"], ["X", "X1"])
    inner = min(described, joint)
    outer = max(interference, inner)
    raw = min(decode, outer)
    branch = "interference" if interference >= inner else "compress"
    breakdown = {
        "DF[i=1]": decode,
        "R[T={},S={1}]": interference,
        "R[T={2},S={1}]": described,
        "R[T={2},S={1,2}]": joint,
    }
    binding = frozenset({1}) if decode <= outer else (
        frozenset({1}) if branch == "interference" or described <= joint else frozenset({1, 2}))
    return RateResult(
        rate=max(raw, 0.0), raw_rate=raw, binding_subset=binding,
        binding_constraint="DF[i=1]" if decode <= outer else branch,
        chosen_T=frozenset() if branch == "interference" else frozenset({2}),
        chosen_T_k={1: frozenset()}, chosen_V=frozenset({2}), term_breakdown=breakdown,
        zero_rate=raw <= 0.0, scheme="two_relay",
        certificate={"branch": branch, "cf_condition_held": relay_gain >= compress_cost - 1e-12,
                     "relay_gain": relay_gain, "compression_cost": compress_cost},
    )


def _c(x):
    return 0.5 * np.log2(1.0 + x)


def rate_df_single(g1: float, g2: float, g3: float, P: float, noise: float, beta: float) -> float:
    """Single-relay DF: g1 source-relay, g2 relay-destination, g3 source-destination"""
    if not 0.0 <= beta <= 1.0:
        raise ConfigurationError(f"beta={beta} out of range [0, 1]")
    return float(_df_single_curve(g1, g2, g3, P, noise, np.array([beta]))[0])


def _df_single_curve(g1, g2, g3, P, noise, betas: np.ndarray) -> np.ndarray:
    relay = _c(g1 ** 2 * betas * P / noise)
    coherent = _c((g3 ** 2 * P + g2 ** 2 * P + 2.0 * np.sqrt((1.0 - betas) * g2 ** 2 * g3 ** 2) * P) / noise)
    return np.minimum(relay, coherent)


def beta_grid(step: float = 1e-3) -> np.ndarray:
    return np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)


def rate_df_single_opt(g1: float, g2: float, g3: float, P: float, noise: float,
                       step: float = 1e-3) -> Tuple[float, float]:
    """Best DF rate over the β grid; ties go to the smaller β"""
    grid = beta_grid(step)
    curve = _df_single_curve(g1, g2, g3, P, noise, grid)
    idx = int(np.argmax(curve))
    return float(curve[idx]), float(grid[idx])


def rate_cf_single(g1: float, g2: float, g3: float, P: float, nhat: float, P1: Optional[float] = None) -> float:
    """Single-relay CF with the interference branch (real channel, unit noise).

    Same gain naming as ``rate_df_single``.
    """
    P1 = P if P1 is None else P1
    described = _c(g3 ** 2 * P + g1 ** 2 * P / (1.0 + nhat))
    forwarded = _c(g3 ** 2 * P + g2 ** 2 * P1) - _c(1.0 / nhat)
    interference = _c(g3 ** 2 * P / (g2 ** 2 * P1 + 1.0))
    return float(max(min(described, forwarded), interference))


def rate_mnnc_search(network: GaussianNetwork, compression: CompressionConfig,
                     strategy: StrategyAssignment, step: float = 0.01, restarts: int = 5,
                     seed: int = 0, seeds: Sequence[Mapping[int, float]] = (),
                     enum_cap: int = MAX_ENUM_RELAYS) -> Tuple[RateResult, Dict[int, float]]:
    """MNNC rate maximized over the superposition fractions of the source and DF relays"""
    nodes = [0] + sorted(strategy.df_set)

    def objective(params):
        inputs = build_input_covariance(network, strategy, list(params))
        try:
            return -rate_mnnc(network, inputs, compression, strategy, enum_cap=enum_cap).raw_rate
        except InfeasibleStrategyError:
            return math.inf

    start_points = [[point[node] for node in nodes] for point in seeds]
    optimizer = SuperpositionGridOptimizer(objective, len(nodes), step=step,
                                           restarts=restarts, seed=seed)
    found = optimizer.optimize(seeds=start_points)
    betas = dict(zip(nodes, (float(b) for b in found.x)))
    inputs = build_input_covariance(network, strategy, betas)
    result = rate_mnnc(network, inputs, compression, strategy, enum_cap=enum_cap)
    result.certificate["betas"] = betas
    return result, betas
