"""Self-similar actions of Baumslag-Solitar-type groups from virtual endomorphisms."""

from .automata import (BoundedDepth, NontrivialAtDepth, Trivial, UndeterminedAtDepth,
                       WreathAutomaton, derived_free_generators, make_bn, odometer)
from .certificate import Certificate, certificate_verify, reduce_to_semidirect
from .constructions import (build_abelian_hnn, build_heis_cyclic_fallback, build_heis_hnn,
                            build_heis_semidirect, build_split1)
from .heisenberg import HeisElem, HeisEndo
from .linear import LinearRep, linearize
from .virtual import (CompiledAutomaton, EndoSystem, VirtualEndo, compile_system,
                      faithfulness_probe, verify_well_defined)

__version__ = "0.1.0"

__all__ = [
    "BoundedDepth", "NontrivialAtDepth", "Trivial", "UndeterminedAtDepth", "WreathAutomaton",
    "derived_free_generators", "make_bn", "odometer", "Certificate", "certificate_verify",
    "reduce_to_semidirect", "build_abelian_hnn", "build_heis_cyclic_fallback", "build_heis_hnn",
    "build_heis_semidirect", "build_split1", "HeisElem", "HeisEndo", "LinearRep", "linearize",
    "CompiledAutomaton", "EndoSystem", "VirtualEndo", "compile_system", "faithfulness_probe",
    "verify_well_defined",
]
