"""Named verification suites producing deterministic JSON reports."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import e8, f2, nikulin
from .discriminant import DiscriminantIsometry, discriminant_module
from .glue import OrientationError, e8m2_solver, glue_group, identity_solver, minus_identity_solver, nikulin_extends, orientation_correct
from .intlinalg import identity, imat, integer_kernel, invariant_factors, saturation
from .isometry import (
    Isometry,
    induced_discriminant_action,
    minus_identity,
    random_reflection_vector,
    reflection,
    spinor_norm,
    spinor_norm_by_orientation,
)
from .lattice import E8, U, determinant, direct_sum, gram_of, inner, is_primitive, orthogonal_complement, square, twist


@dataclass
class Failure:
    trial: int | None
    seed: int | None
    description: str
    witness: object = None


@dataclass
class SuiteReport:
    suite: str
    trials: int
    failures: list[Failure] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    elapsed_ms: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, description: str, *, trial: int | None = None, seed: int | None = None, witness=None) -> None:
        self.failures.append(Failure(trial, seed, description, _jsonable(witness)))

    def check(self, ok: bool, description: str, **kw) -> bool:
        if not ok:
            self.fail(description, **kw)
        return ok

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "failures": [asdict(f) for f in self.failures],
            "values": _jsonable(self.values),
            "elapsed_ms": self.elapsed_ms,
            "pass": self.passed,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def trial_seed(seed: int, trial: int) -> int:
    return seed * 1_000_003 + trial


def _c():
    return nikulin.constants()


# -- suites --------------------------------------------------------------------------

def suite_constants(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    block_dets = {
        "lambda_nik": (-4) ** 3 * 1 * (-2) ** 2,
        "lambda_k3": (-1) ** 3 * 1 * 1 * (-2),
        "lambda_fix": (-1) ** 3 * 2 ** 8 * (-2),
        "lambda_1": (-1) ** 3 * 2 ** 8 * 1,
    }
    dets = {}
    for name, L in (("lambda_nik", c.lambda_nik), ("lambda_k3", c.lambda_k3),
                    ("lambda_fix", c.lambda_fix), ("lambda_1", c.lambda_1)):
        d = determinant(L)
        dets[name] = d
        rep.check(d == block_dets[name], f"determinant of {name} disagrees with the block product",
                  witness={"bareiss": d, "blocks": block_dets[name]})
        snf = 1
        for x in invariant_factors(L.gram):
            snf *= x
        rep.check(snf == abs(d), f"Smith form of {name} disagrees with |det|", witness=[snf, d])
    A = discriminant_module(c.lambda_nik)
    rep.check(A.order == abs(dets["lambda_nik"]), "|A_lambda_nik| differs from |det|")
    rep.values.update(determinants=dets, discriminant_lambda_nik=list(A.invariant_factors))


def suite_embeddings(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    jf, jn = c.j_fix, c.j_nik
    rep.check(np.array_equal(jf.T @ c.lambda_k3.gram @ jf, c.lambda_fix.gram),
              "j_fix is not isometric on all basis pairs")
    rep.check(np.array_equal(jn.T @ c.lambda_nik.gram @ jn, 2 * c.lambda_fix.gram),
              "j_nik does not double the form on all basis pairs")
    s = c.sigma.matrix
    rep.check(np.array_equal(s @ s, identity(23)), "sigma is not an involution")
    fixed = integer_kernel(s - identity(23))
    rep.check(nikulin.same_lattice(fixed, jf), "sigma-fixed lattice differs from the image of j_fix")
    rep.check(is_primitive(c.lambda_k3, jf), "image of j_fix is not primitive")
    rep.check(nikulin.same_lattice(saturation(jn), nikulin.sigma_y_perp()),
              "saturation of the j_nik image differs from sigma_y^perp")
    L = c.lambda_nik
    dy, sy = c.delta_y, c.sigma_y
    rep.check(square(L, dy) == -4 and square(L, sy) == -4 and inner(L, dy, sy) == 0,
              "delta_y, sigma_y do not have squares -4 and pairing 0")
    g1, g2 = (dy + sy) // 2, (dy - sy) // 2
    rep.check(np.array_equal(g1, L.basis_vector(14)) and np.array_equal(g2, L.basis_vector(15)),
              "(delta_y ± sigma_y)/2 are not the <-2> generators")
    rep.check(np.array_equal(jn[:, 14], dy), "j_nik does not send the <-2> generator to delta_y")
    rep.check(np.array_equal(jf[:, 14], c.delta_x), "j_fix does not send the <-2> generator to delta_x")
    rep.check(np.array_equal(nikulin.phi(c.sigma_1), sy), "phi(sigma_1) differs from sigma_y")
    rep.check(np.array_equal(c.phi.T @ L.gram @ c.phi, 2 * c.lambda_1.gram), "phi does not double the form")
    rep.values.update(sigma_fixed_rank=int(fixed.shape[1]))


def suite_index(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    by_det = nikulin.index_by_determinants()
    by_snf = nikulin.index_by_smith_form()
    rep.check(by_det == by_snf, "index routes disagree", witness=[by_det, by_snf])
    # third route through the primitive saturation sigma_y^perp of the j_nik image
    perp = nikulin.sigma_y_perp()
    glue = glue_group(c.lambda_nik, perp)
    inner_index = 1
    for d in invariant_factors(_coefficients(perp, c.j_nik)):
        inner_index *= d
    by_saturation = inner_index * len(glue.M)
    rep.check(by_saturation == by_det, "index through sigma_y^perp disagrees", witness=[inner_index, len(glue.M)])
    rep.values.update(index_by_determinants=by_det, index_by_smith_form=by_snf,
                      index_by_saturation=by_saturation, j_nik_invariant_factors=invariant_factors(c.j_nik),
                      sigma_y_perp_rank=int(perp.shape[1]),
                      sigma_y_perp_determinant=int(determinant_of(c.lambda_nik, perp)))
    even = nikulin.even_divisibility_sublattice()
    rep.check(nikulin.same_lattice(even, c.j_nik),
              "even-divisibility sublattice of sigma_y^perp differs from j_nik(lambda_fix(2))")


def _coefficients(basis, sub):
    from .intlinalg import solve_in_span, to_int
    return to_int(solve_in_span(basis, sub))


def determinant_of(L, basis) -> int:
    from .intlinalg import determinant
    return determinant(gram_of(L, basis))


def suite_mod2(rep: SuiteReport, seed: int, trials: int) -> None:
    cert = f2.verify_mod2_discriminant_isomorphism()
    rep.values.update({k: v for k, v in cert.items() if k != "pass"})
    rep.check(cert["pass"], "alpha is not a quadratic-module isomorphism", witness=cert["form_failures"][:5])


def _random_fixed(rng, length=3, **kw):
    return nikulin.random_fixed_isometry(rng, length, **kw)


def suite_twisted_transfer(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    L = c.lambda_nik
    pool_rng = random.Random(seed)
    pool = [reflection(L, random_reflection_vector(L, pool_rng)) for _ in range(24)]
    samples = []
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        f = Isometry(L, _word(pool, rng, rng.randint(1, 6)))
        try:
            T = nikulin.transfer(f)
        except AssertionError as exc:
            rep.fail(str(exc), trial=t, seed=s, witness=f.matrix)
            continue
        rep.check(np.array_equal(c.phi @ T.matrix, f.matrix @ c.phi),
                  "phi does not intertwine transfer(f) and f", trial=t, seed=s)
        samples.append((f, T))
    pairs = min(200, len(samples) // 2) if trials >= 2 else 0
    for k in range(pairs):
        (f, Tf), (g, Tg) = samples[2 * k], samples[2 * k + 1]
        rep.check(np.array_equal(nikulin.transfer(f @ g).matrix, Tf.matrix @ Tg.matrix),
                  "transfer is not multiplicative", trial=2 * k)
    r = nikulin.transfer(reflection(L, c.sigma_y))
    rep.check(r == reflection(c.lambda_1, c.sigma_1), "transfer(R_sigma_y) differs from R_sigma_1")
    rep.values.update(transfers=len(samples), multiplicative_pairs=pairs)


def _word(pool, rng, length):
    m = identity(pool[0].lattice.rank)
    for _ in range(length):
        m = pool[rng.randrange(len(pool))].matrix @ m
    return m


def suite_glue(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    glue = nikulin.k3_glue()
    chk = glue.check()
    rep.values["glue_check"] = chk
    for k, ok in chk.items():
        if k != "order":
            rep.check(bool(ok), f"glue identity {k} fails")
    rep.check(chk["order"] == 256, "glue group order is not 256", witness=chk["order"])
    # every glue element is [v] ⊕ 0 ⊕ [-v]: equal E8 parts, trivial <-2> part
    A_T, A_P = glue.A_T, glue.A_perp
    diag_ok = True
    for a, b in glue.M:
        x, y = A_T.lift(a), A_P.lift(b)
        if any((x[6 + j] + y[j]).denominator != 1 for j in range(8)) or x[14].denominator != 1:
            diag_ok = False
        if any(u.denominator != 1 for u in x[:6]):
            diag_ok = False
    rep.check(diag_ok, "glue group is not the diagonal of the E8(-2) parts")
    # split case and -id case
    split = direct_sum([twist(E8(), -2), U()])
    Tb = imat(np.eye(10, dtype=int))[:, :8]
    ext = nikulin_extends(split, Tb, identity(8), identity_solver)
    rep.check(ext is not None and ext.isometry.is_identity(), "split case does not extend the identity")
    ext = nikulin_extends(c.lambda_k3, c.j_fix, -identity(15), minus_identity_solver, glue)
    rep.check(ext is not None and ext.isometry == minus_identity(c.lambda_k3), "-id does not extend to -id")
    certs = []
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        phi = _random_fixed(rng, rng.randint(1, 4))
        ext = nikulin_extends(c.lambda_k3, c.j_fix, phi.matrix, e8m2_solver, glue)
        if ext is None:
            rep.fail("no extension produced", trial=t, seed=s, witness=phi.matrix)
            continue
        F = ext.isometry.matrix
        rep.check(np.array_equal(F @ c.j_fix, c.j_fix @ phi.matrix), "extension does not restrict to phi",
                  trial=t, seed=s)
        rep.check(np.array_equal(F @ c.k3_anti_invariant, c.k3_anti_invariant @ ext.psi),
                  "extension does not restrict to psi on the complement", trial=t, seed=s)
        certs.append({"trial": t, "seed": s, "psi": ext.psi})
    rep.values["certificates"] = certs


def suite_characteristic_vector(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    A = discriminant_module(c.lambda_fix)
    w = f2.characteristic_vector(A).w
    delta_half = [0] * 15
    delta_half[14] = 1
    target = A.coords([x / 2 for x in map(__import__("fractions").Fraction, delta_half)])
    rep.check(w == target, "characteristic vector is not the <-2> generator", witness=[w, target])
    w8 = f2.characteristic_vector(f2.e8_mod2_space()).w
    rep.check(w8 == 0, "characteristic vector of E8/2E8 is not zero", witness=w8)
    L = c.lambda_fix
    pool_rng = random.Random(seed)
    pool = [reflection(L, random_reflection_vector(L, pool_rng)) for _ in range(24)]
    group = f2.e8_mod2_group()
    moved = 0
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        f = Isometry(L, _word(pool, rng, rng.randint(1, 8)))
        act = induced_discriminant_action(f, A)
        if act(w) != w:
            moved += 1
            rep.fail("discriminant isometry moves the characteristic vector", trial=t, seed=s)
        g, _ = group.random_element(rng)
        if g[w8] != w8:
            rep.fail("F2 isometry moves the characteristic vector", trial=t, seed=s)
    rep.values.update(characteristic_vector=list(w), samples=trials)


def suite_surjectivity(rep: SuiteReport, seed: int, trials: int, emit_words: str | None = None) -> None:
    group = f2.e8_mod2_group()
    order = group.order()
    formula = f2.orthogonal_group_order(4, plus=True)
    rep.check(order == formula, "group order differs from the orthogonal group order", witness=[order, formula])
    rep.values.update(order=order, formula=formula, base=group.base,
                      transversal_sizes=group.transversal_sizes(), strong_generators=len(group.strong_perms),
                      backend=f2.BACKEND)
    A = f2.e8m2_discriminant()
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        mat, _ = f2.random_group_element(rng)
        target = f2.discriminant_isometry_from_f2(mat)
        try:
            lift = f2.lift_discriminant_isometry(target)
        except AssertionError as exc:
            rep.fail(str(exc), trial=t, seed=s, witness=list(mat))
            continue
        rep.check(induced_discriminant_action(lift, A) == target, "lift does not re-induce the target",
                  trial=t, seed=s)
    if emit_words:
        import json
        roots = e8.positive_roots()
        words = [{"base_point": lvl.point,
                  "transversal": {str(pt): [list(roots[group.labels[k]]) for k in w] for pt, w in lvl.words.items()}}
                 for lvl in group.levels]
        with open(emit_words, "w") as fh:
            json.dump({"order": order, "levels": words}, fh)


def suite_equivariant(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    s_mat = c.sigma.matrix
    counts = {"phi_spinor_plus": 0, "phi_spinor_minus": 0, "orientation_failures": 0}
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        phi = _random_fixed(rng, rng.randint(1, 4))
        counts["phi_spinor_plus" if spinor_norm(phi) == 1 else "phi_spinor_minus"] += 1
        try:
            ext = nikulin.extend_equivariantly(phi)
        except AssertionError as exc:
            rep.fail(str(exc), trial=t, seed=s, witness=phi.matrix)
            continue
        F = ext.isometry.matrix
        rep.check(np.array_equal(F @ c.j_fix, c.j_fix @ phi.matrix), "restriction differs from phi", trial=t, seed=s)
        for j in range(23):
            e = c.lambda_k3.basis_vector(j)
            if not np.array_equal(s_mat @ (F @ e), F @ (s_mat @ e)):
                rep.fail("sigma does not commute with the extension", trial=t, seed=s, witness=j)
                break
        try:
            out = orientation_correct(ext)
            rep.check(spinor_norm(out.isometry) == 1, "corrected extension has spinor norm -1", trial=t, seed=s)
        except OrientationError as exc:
            counts["orientation_failures"] += 1
            rep.fail(str(exc), trial=t, seed=s,
                     witness={"spinor_phi": spinor_norm(phi), "spinor_F": spinor_norm(ext.isometry),
                              "spinor_F_minus_psi": spinor_norm(orientation_candidate(ext))})
    rep.values.update(counts)


def orientation_candidate(ext):
    from .glue import assemble
    return assemble(ext.glue, ext.phi, -ext.psi)


EXPECTED_SIGMA_Y_INVARIANTS = (-4, 2, False, True)


def suite_orbit_invariants(rep: SuiteReport, seed: int, trials: int) -> None:
    c = _c()
    L = c.lambda_nik
    base = nikulin.orbit_invariants(c.sigma_y)
    rep.values["sigma_y"] = base.as_tuple()
    rep.check(base.as_tuple() == EXPECTED_SIGMA_Y_INVARIANTS, "invariants of sigma_y differ from the expected tuple",
              witness={"computed": base.as_tuple(), "expected": EXPECTED_SIGMA_Y_INVARIANTS,
                       "lambda1_ray_generator": nikulin.lambda1_ray_generator(c.sigma_y)})
    generators = 0
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        word = nikulin.random_g_word(rng, rng.randint(1, 6))
        for g in word:
            generators += 1
            sn = spinor_norm(g.realized)
            rep.check(sn == 1 and spinor_norm_by_orientation(g.realized) == 1,
                      "monodromy generator is not orientation preserving", trial=t, seed=s, witness=g.to_json())
        f = nikulin.realize(word)
        v = f(c.sigma_y)
        inv = nikulin.orbit_invariants(v)
        rep.check(inv == base, "invariants of g(sigma_y) differ from those of sigma_y", trial=t, seed=s,
                  witness={"image": v, "invariants": inv.as_tuple()})
        rep.check(inv.e8_mod4_zero == nikulin.e8_mod4_zero_via_lambda1(f),
                  "E8 mod 4 test disagrees with the lambda_1 cross-check", trial=t, seed=s)
        # the ray of f(v) is the phi-image of transfer(f) applied to the ray generator
        w = nikulin.lambda1_ray_generator(c.sigma_y)
        img = nikulin.phi(nikulin.transfer(f)(w))
        rep.check(_same_ray(img, v), "ray conjugation identity fails", trial=t, seed=s)
    rep.values["generators_checked"] = generators


def _same_ray(a, b) -> bool:
    from .intlinalg import primitive_on_ray
    return np.array_equal(primitive_on_ray(a), primitive_on_ray(b))


def suite_reconstruction(rep: SuiteReport, seed: int, trials: int) -> None:
    counts = {"epsilon_plus": 0, "epsilon_minus": 0}
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        f = nikulin.sample_sigma_fixing_isometry(s, rng.randint(1, 5))
        try:
            r = nikulin.reconstruct(f)
        except AssertionError as exc:
            rep.fail(str(exc), trial=t, seed=s, witness=f.matrix)
            continue
        counts["epsilon_plus" if r.epsilon == 1 else "epsilon_minus"] += 1
        rep.check(np.array_equal(r.operator.matrix, r.epsilon * f.matrix),
                  "certificate operator differs from epsilon * f", trial=t, seed=s)
        rep.check(r.epsilon == spinor_norm(f), "epsilon differs from the spinor norm of f", trial=t, seed=s)
    rep.values.update(counts)
    rep.values["round_trips"] = counts["epsilon_plus"] + counts["epsilon_minus"]


def named_lattices() -> dict:
    c = _c()
    return {
        "lambda-nik": c.lambda_nik, "lambda-k3": c.lambda_k3, "lambda-fix": c.lambda_fix,
        "lambda-1": c.lambda_1, "u": U(), "u2": twist(U(), 2), "e8": E8(),
        "e8m1": twist(E8(), -1), "e8m2": twist(E8(), -2),
    }


def suite_spinor(rep: SuiteReport, seed: int, trials: int) -> None:
    lattices = list(named_lattices().items())
    refl = []
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        name, L = lattices[t % len(lattices)]
        v = random_reflection_vector(L, rng)
        R = reflection(L, v)
        expected = -1 if square(L, v) > 0 else 1
        rep.check(spinor_norm(R) == expected, "spinor norm of a reflection is not -sign(v^2)",
                  trial=t, seed=s, witness={"lattice": name, "v": v})
        rep.check(spinor_norm_by_orientation(R) == expected, "orientation route disagrees on a reflection",
                  trial=t, seed=s, witness={"lattice": name, "v": v})
        refl.append((name, L, R))
    by_lattice: dict = {}
    for name, L, R in refl:
        by_lattice.setdefault(name, []).append(R)
    pairs = 0
    for t in range(trials):
        s = trial_seed(seed + 1, t)
        rng = random.Random(s)
        name = lattices[t % len(lattices)][0]
        pool = by_lattice.get(name)
        if not pool:
            continue
        f = Isometry(pool[0].lattice, _word(pool, rng, rng.randint(1, 4)))
        g = Isometry(pool[0].lattice, _word(pool, rng, rng.randint(1, 4)))
        pairs += 1
        rep.check(spinor_norm(f @ g) == spinor_norm(f) * spinor_norm(g), "spinor norm is not multiplicative",
                  trial=t, seed=s, witness=name)
    c = _c()
    m = minus_identity(c.lambda_nik)
    rep.values.update(minus_identity_lambda_nik=spinor_norm(m),
                      minus_identity_by_orientation=spinor_norm_by_orientation(m), pairs=pairs)
    rep.check(spinor_norm(m) == -1, "spinor norm of -id on lambda_nik is not -1")


# name -> (function, default trials); the second table maps the published
# suite names onto the descriptive ones
SUITES: dict[str, tuple[Callable, int]] = {
    "constants": (suite_constants, 0),
    "embeddings": (suite_embeddings, 0),
    "index": (suite_index, 0),
    "mod2-discriminant": (suite_mod2, 0),
    "twisted-transfer": (suite_twisted_transfer, 500),
    "glue-extension": (suite_glue, 20),
    "characteristic-vector": (suite_characteristic_vector, 1000),
    "surjectivity": (suite_surjectivity, 100),
    "equivariant-extension": (suite_equivariant, 50),
    "orbit-invariants": (suite_orbit_invariants, 200),
    "reconstruction": (suite_reconstruction, 100),
    "spinor-norm": (suite_spinor, 200),
}

ALIASES = {
    "lemma-2-3": "mod2-discriminant",
    "prop-2-1": "twisted-transfer",
    "prop-2-2": "glue-extension",
    "prop-2-5-surjectivity": "surjectivity",
    "lemma-3-1": "orbit-invariants",
    "main-theorem": "reconstruction",
    "cor-2-6": "equivariant-extension",
}


def suite_names() -> list[str]:
    return sorted(set(SUITES) | set(ALIASES))


def run_suite(name: str, seed: int = 0, trials: int | None = None, **kw) -> SuiteReport:
    key = ALIASES.get(name, name)
    if key not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    fn, default = SUITES[key]
    n = default if trials is None else trials
    rep = SuiteReport(name, n)
    start = time.perf_counter()
    fn(rep, seed, n, **kw)
    rep.elapsed_ms = int((time.perf_counter() - start) * 1000)
    return rep
