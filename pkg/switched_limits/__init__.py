from switched_limits.config import DEFAULT_TOLERANCES  # noqa
from switched_limits.config import RunConfig  # noqa
from switched_limits.config import Tolerances  # noqa
from switched_limits.criteria import StabilityReport  # noqa
from switched_limits.criteria import build_report  # noqa
from switched_limits.criteria import condition_c  # noqa
from switched_limits.criteria import planar_classify  # noqa
from switched_limits.criteria import theorem4_check  # noqa
from switched_limits.criteria import theorem6_any_input  # noqa
from switched_limits.criteria import theorem6_check  # noqa
from switched_limits.criteria import theorem7_pair_check  # noqa
from switched_limits.linalg import Subspace  # noqa
from switched_limits.linalg import matrix_exponential  # noqa
from switched_limits.linalg import nullspace  # noqa
from switched_limits.linalg import polar_decompose  # noqa
from switched_limits.linalg import subspace_intersect  # noqa
from switched_limits.linalg import subspace_sum  # noqa
from switched_limits.linalg import sym_sqrt  # noqa
from switched_limits.signals import SwitchingSignal  # noqa
from switched_limits.signals import classify  # noqa
from switched_limits.signals import constant_signal  # noqa
from switched_limits.signals import explicit_signal  # noqa
from switched_limits.signals import generate_average_dwell  # noqa
from switched_limits.signals import generate_chaotic  # noqa
from switched_limits.signals import generate_dwell_random  # noqa
from switched_limits.signals import generate_periodic  # noqa
from switched_limits.signals import register_generator  # noqa
from switched_limits.simulator import estimate_su  # noqa
from switched_limits.simulator import flow  # noqa
from switched_limits.simulator import inclusion_checks  # noqa
from switched_limits.simulator import record_flow  # noqa
from switched_limits.simulator import sample_omega  # noqa
from switched_limits.systems import SwitchedSystem  # noqa
from switched_limits.systems import analyze_system  # noqa
from switched_limits.systems import check_common_lyapunov  # noqa
from switched_limits.systems import compute_K  # noqa
from switched_limits.systems import compute_V  # noqa
from switched_limits.systems import normalize_system  # noqa
