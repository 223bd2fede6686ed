"""Published multiplication tables, idempotents and metric data, plus helpers
that turn the text forms into elements of the branch rings."""

from fractions import Fraction

from qcoh.algebra.poly import JetPolynomial

CORRELATORS = {
    "Q": {"[1;2,3]": 1, "[1;2,2,2]": 1, "[2;3,3,3]": 1, "[2;2,2,3,3]": 1},
    "V5": {"[1;3]": 3, "[1;2,2]": 1, "[2;3,3]": 1, "[2;2,2,3]": 1, "[3;3,3,3]": 1,
           "[2;2,2,2,2]": 1, "[3;2,2,3,3]": 2, "[4;3,3,3,3]": 3},
    "V22": {"[1;2]": 2, "[2;3]": 6, "[2;2,2]": 1, "[3;2,3]": 3, "[4;3,3]": 10, "[3;2,2,2]": 1,
            "[4;2,2,3]": 4, "[5;2,3,3]": 16, "[6;3,3,3]": 65, "[4;2,2,2,2]": 2,
            "[5;2,2,2,3]": 9, "[6;2,2,3,3]": 41, "[7;2,3,3,3]": 186, "[8;3,3,3,3]": 840},
}

# (a, b) -> {component: coefficient}, components not listed are zero
PRODUCTS = {
    "Q": {
        (1, 1): {2: "2", 1: "q*x3", 0: "q*x2"},
        (1, 2): {3: "1", 0: "q", 2: "q*x3", 1: "q*x2"},
        (1, 3): {1: "q", 2: "q*x2", 0: "2*q^2*x3"},
        (2, 2): {1: "q", 2: "q*x2", 0: "q^2*x3"},
        (2, 3): {2: "q", 0: "q^2*x2", 1: "q^2*x3"},
        (3, 3): {0: "q^2", 1: "q^2*x2", 2: "2*q^2*x3"},
    },
    "V5": {
        (1, 1): {2: "5 + 3*q*x3", 0: "3*q + 4*q^2*x3", 1: "q*x2"},
        (1, 2): {3: "1", 1: "q + 2*q^2*x3", 2: "q*x2", 0: "2*q^2*x2"},
        (1, 3): {2: "3*q + 4*q^2*x3", 0: "2*q^2 + 3*q^3*x3", 1: "2*q^2*x2"},
        (2, 2): {2: "q + 2*q^2*x3", 0: "q^2 + 2*q^3*x3", 1: "q^2*x2"},
        (2, 3): {1: "q^2 + 2*q^3*x3", 2: "2*q^2*x2", 0: "2*q^3*x2"},
        (3, 3): {2: "2*q^2 + 3*q^3*x3", 0: "q^3 + 3*q^4*x3", 1: "2*q^3*x2"},
    },
    "V22": {
        (1, 1): {2: "22 + 2*q*x2 + 48*q^2*x3", 1: "2*q + 4*q^2*x2 + 27*q^3*x3",
                 0: "24*q^2 + 27*q^3*x2 + 160*q^4*x3"},
        (1, 2): {3: "1", 2: "2*q + 4*q^2*x2 + 27*q^3*x3", 1: "2*q^2 + 3*q^3*x2 + 16*q^4*x3",
                 0: "9*q^3 + 16*q^4*x2 + 80*q^5*x3"},
        (1, 3): {2: "24*q^2 + 27*q^3*x2 + 160*q^4*x3", 1: "9*q^3 + 16*q^4*x2 + 80*q^5*x3",
                 0: "40*q^4 + 80*q^5*x2 + 390*q^6*x3"},
        (2, 2): {2: "2*q^2 + 3*q^3*x2 + 16*q^4*x3", 1: "q^3 + 2*q^4*x2 + 9*q^5*x3",
                 0: "4*q^4 + 9*q^5*x2 + 41*q^6*x3"},
        (2, 3): {2: "9*q^3 + 16*q^4*x2 + 80*q^5*x3", 1: "4*q^4 + 9*q^5*x2 + 41*q^6*x3",
                 0: "16*q^5 + 41*q^6*x2 + 186*q^7*x3"},
        (3, 3): {2: "40*q^4 + 80*q^5*x2 + 390*q^6*x3", 1: "16*q^5 + 41*q^6*x2 + 186*q^7*x3",
                 0: "65*q^6 + 186*q^7*x2 + 840*q^8*x3"},
    },
}

CHAR_POLYS = {
    "Q": "u^4 - 108*q*u",
    "V5": "u^4 - 44*q*u^2 - 16*q^2",
    "V22": "u^4 - 4*q*u^3 - 88*q^2*u^2 - 300*q^3*u - 304*q^4",
}
V22_FACTORS = ("u + 4*q", "u^3 - 8*q*u^2 - 56*q^2*u - 76*q^3")

# Q displays are written in xi with xi^3 = 4q; the eigenvalue is u = 3 xi.
Q_E0 = ("1/2", "1/4*x2", "1/2*x3", "-1/2*q^-1")
Q_EI_PRINTED = (
    "1/6 - 1/36*u*x2",
    "1/12*q^-1*u^2 - 1/12*x2 - 1/12*u*x3",
    "1/6*q^-1*u - 1/18*q^-1*u^2*x2 - 1/6*x3",
    "1/6*q^-1 - 1/27*q^-1*u*x2 - 1/12*q^-1*u^2*x3",
)
Q_EI_CORRECTED = Q_EI_PRINTED[:3] + ("1/6*q^-1 - 1/9*q^-1*u*x2 - 1/12*q^-1*u^2*x3",)
Q_ETA_IJ_PRINTED = "-1/72*u^2 - 1/162*u*v - 1/72*v^2"
Q_ETA_IJ_CORRECTED = "-1/72*u^2 - 1/54*u*v - 1/72*v^2"

V5_EI_DENOM = "4000*q^3"
V5_EI = (
    "1440*q^3 - 20*q^2*u^2 - 1968*u*q^3*x2 + 44*u^3*q^2*x2 + 352*q^4*x3 - 16*u^2*q^3*x3",
    "70*q*u^3 - 3040*q^2*u + 176*q^3*x2 - 8*q^2*u^2*x2 - 5412*u*q^3*x3 + 121*u^3*q^2*x3",
    "-880*q^2 + 40*q*u^2 - 2864*u*q^2*x2 + 62*q*u^3*x2 + 1056*q^3*x3 - 48*u^2*q^2*x3",
    "4920*q*u - 110*u^3 - 16*q*u^2*x2 + 6036*q^2*u*x3 + 352*q^2*x2 - 138*q*u^3*x3",
)

V22_E0 = ("1/2 + q*x2 + 2*q^2*x3", "1/4*x2 + 1/2*q*x3", "2*q^-2 + 2*q^-1*x2 + 3/2*x3",
          "-1/2*q^-3 - 1/2*q^-2*x2")
V22_EI_DENOM = "5324*q^4"
V22_EI = (
    "-71742*q^4 - 24552*q^3*u + 2354*q^2*u^2 - 130876*q^5*x2 - 43283*u*q^4*x2 + 4168*u^2*q^3*x2"
    " - 483464*q^6*x3 - 161648*u*q^5*x3 + 15528*u^2*q^4*x3",
    "-30272*q^3 - 10186*q^2*u + 979*q*u^2 - 38977*q^4*x2 - 12940*u*q^3*x2 + 1245*u^2*q^2*x2"
    " - 145898*q^5*x3 - 48889*u*q^4*x3 + 4694*u^2*q^3*x3",
    "-118712*q^2 - 38126*q*u + 3696*u^2 - 143992*q^3*x2 - 46818*u*q^2*x2 + 4522*u^2*q*x2"
    " - 491334*q^4*x3 - 164832*u*q^3*x3 + 15822*u^2*q^2*x3",
    "49346*q + 16192*u - 1562*u^2*q^-1 + 35042*q^2*x2 + 11348*u*q*x2 - 1098*u^2*x2"
    " + 112272*q^3*x3 + 37824*u*q^2*x3 - 3633*u^2*q*x3",
)
V22_ETA_I_PRINTED = "49346*q + 16192*u - 1562*u^2*q^-1"


def rescale(p: JetPolynomial, var: str, s) -> JetPolynomial:
    """Substitute ``var -> var / s``."""
    i = p.ring.index[var]
    s = Fraction(s)
    return JetPolynomial(p.ring, {e: c / s ** e[i] for e, c in p.terms.items()})


def in_branch(sd, br, text, scale=1, denom="1"):
    """``text / denom`` in the branch ring, ``u`` read as ``u / scale``."""
    R = sd.m.coefficient_ring.extend(poly=("u",))
    num = sd.to_quotient(rescale(R.parse(text), "u", scale), br)
    return num * sd.to_quotient(R.parse(denom), br).inverse()


def in_pair(sd, T, text, scale=1, denom="1"):
    """``text / denom`` in a pair ring; ``u`` is the first root and ``v`` the second."""
    R = sd.m.coefficient_ring.extend(poly=("u", "v"))
    base = sd.m.coefficient_ring
    QR = T.base
    u, v = T.coerce(QR.gen()), T.gen()
    iu, iv = R.index["u"], R.index["v"]

    def conv(p):
        acc = T.zero()
        for e, c in p.terms.items():
            mono = tuple(e[:base.nvars])
            coef = JetPolynomial(base, {mono: c / Fraction(scale) ** (e[iu] + e[iv])})
            acc = acc + T.coerce(QR.coerce(coef)) * u ** e[iu] * v ** e[iv]
        return acc

    return conv(R.parse(text)) * conv(R.parse(denom)).inverse()


def second_root_modulus(br, text):
    """Monic modulus in ``v`` over the branch ring, from ``{power: coefficient text}``."""
    QR = br.ring
    R = QR.base.extend(poly=("u",))
    # coefficients may mention u (the first root)
    out = []
    for k in range(max(text) + 1):
        p = R.parse(text.get(k, "0"))
        parts = p.coefficients_in("u")
        acc = QR.zero()
        for n, c in parts.items():
            acc = acc + QR.coerce(JetPolynomial(QR.base, {e[:QR.base.nvars]: x for e, x in c.terms.items()})) * QR.gen() ** n
        out.append(acc)
    return out
