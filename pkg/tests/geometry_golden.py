"""Published cylindrical transcripts and symbolic twins of the oracle fields."""
import sympy as sp

from tensorkernel.geometry import COVARIANT, CONTRAVARIANT, ComponentField
from tensorkernel.scalar import eval_at, normal_text, parse_scalar

LG = "matrix([1,0,0],[0,r^2,0],[0,0,1])"
UG = "matrix([1,0,0],[0,1/r^2,0],[0,0,1])"

DIV_B = "'diff(B3,z,1)+'diff(B2,theta,1)+'diff(B1,r,1)+B1/r"
DIV_D = "'diff(D3,z,1)+'diff(D2,theta,1)+'diff(D1,r,1)+D1/r-4*%pi*rho"
ROT_H = ("matrix([('diff(H_3,theta,1)-'diff(H_2,z,1))/abs(r)+'diff(D1,t,1)/c-4*%pi*j1/c],"
         "[-('diff(H_3,r,1)-'diff(H_1,z,1))/abs(r)+'diff(D2,t,1)/c-4*%pi*j2/c],"
         "[('diff(H_2,r,1)-'diff(H_1,theta,1))/abs(r)+'diff(D3,t,1)/c-4*%pi*j3/c])")
ROT_E = ("matrix([('diff(E_3,theta,1)-'diff(E_2,z,1))/abs(r)+'diff(B1,t,1)/c],"
         "['diff(B2,t,1)/c-('diff(E_3,r,1)-'diff(E_1,z,1))/abs(r)],"
         "[('diff(E_2,r,1)-'diff(E_1,theta,1))/abs(r)+'diff(B3,t,1)/c])")
MAXWELL = [DIV_B, DIV_D, ROT_H, ROT_E]


def golden_normal(text, spec):
    """Normal-form text of a transcription, with field names as functions."""
    return normal_text(parse_scalar(text, spec.function_deps()))


def symbolic_fields(chart):
    a, b, c = chart.coords
    v = ComponentField(CONTRAVARIANT, (sp.sin(a) * b + 1, a * c + sp.cos(b),
                                       sp.exp(sp.Rational(3, 10) * c) * a))
    w = ComponentField(COVARIANT, (b * c + a ** 2, sp.sin(a + c), a * sp.cos(b) + c))
    f = a ** 2 * sp.sin(b) + sp.cos(c) * a
    return v, w, f


def at(chart, e, x):
    return eval_at(e, {s.name: float(v) for s, v in zip(chart.coords, x)})
