#pragma once

namespace uwr {

// log(exp(z^2) erfc(z)), accurate for all z (no overflow for large z).
double log_erfcx(double z);

}  // namespace uwr
