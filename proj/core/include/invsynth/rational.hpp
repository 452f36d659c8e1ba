#pragma once

#include <gmpxx.h>

#include <string>

#include "invsynth/ir.hpp"

namespace invsynth {

// All acceptance-path arithmetic is exact; mpq_class keeps itself canonical.
using Rat = mpq_class;

inline Rat rat_of(Int v) { return Rat(static_cast<long>(v)); }

inline bool rat_is_integral(const Rat& r) { return r.get_den() == 1; }

inline Rat rat_floor(const Rat& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rat(q);
}

inline Rat rat_ceil(const Rat& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rat(q);
}

inline Int rat_to_int(const Rat& r) {
  if (!rat_is_integral(r)) throw std::logic_error("rational is not integral: " + r.get_str());
  if (!r.get_num().fits_slong_p()) throw std::logic_error("integer out of range: " + r.get_str());
  return static_cast<Int>(r.get_num().get_si());
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace invsynth
