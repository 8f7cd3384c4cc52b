#include "qmssb/rng.hpp"

namespace qmssb {

static_assert(derive_seed(1, 0) != derive_seed(1, 1));
static_assert(derive_seed(1, 0) != derive_seed(2, 0));

}  // namespace qmssb
