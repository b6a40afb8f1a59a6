#pragma once

#include "hetlab/model.hpp"

namespace fixtures {

// Sample 10505 of the direct-conditions search with seed 9.
inline constexpr const char* kDirectSet =
    R"({"b11":3.505722316532769,"b12":2.4597904856348403,"b13":-4.94679709981517,)"
    R"("b14":-2.8966790046327384,"b21":0.3915103354304268,"b22":-0.31253373400103257,)"
    R"("b23":-2.0543562375939186,"b24":-2.6792860800013933,"b31":-3.359425063685787,)"
    R"("b32":-1.9791664394398083,"b33":-0.17310168266281778,"b34":-4.5290039408877,)"
    R"("b41":-4.5106016170097964,"b42":-4.6813706891682685,"b43":-3.463513238373684,)"
    R"("b44":-2.644705461955225,"c1":-1.9603527225828339,"c3":-4.729139169382787,)"
    R"("c4":-0.08909748486817914,"d2":-4.2959729186064894,"d3":7.547783318238408,)"
    R"("d4":9.460632330916694})";

inline hetlab::CoefficientSet direct_set() { return hetlab::coefficients_from_json(kDirectSet); }

// Reference set with xi_b turned into a sink of the full system.
inline hetlab::CoefficientSet sink_set() {
  auto c = hetlab::reference_coefficients();
  c.d3 = -5.0;
  c.d4 = -6.0;
  return c;
}

}  // namespace fixtures
