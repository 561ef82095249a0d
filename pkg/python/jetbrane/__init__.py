from jetbrane.algebroid import GaugeParameter, Theory  # noqa: F401
from jetbrane.bv import ExtendedTheory, LocalFunctional, extend  # noqa: F401
from jetbrane.dsl import parse_auxiliary, parse_theory  # noqa: F401
from jetbrane.jet import EvolutionaryField  # noqa: F401
from jetbrane.kernel import Expr, SpaceSpec  # noqa: F401
from jetbrane.pipeline import Report, run_pipeline  # noqa: F401
from jetbrane.weak import AnsatzConfig  # noqa: F401
