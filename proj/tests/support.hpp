#pragma once

#include <random>
#include <string>
#include <vector>

#include "jetvar/expr.hpp"

namespace testsupport {

// Random expression over `names`; sticks to functions that stay finite on [-2,2]
// except for occasional reciprocals of positive quantities.
inline jetvar::Expr random_expr(std::mt19937_64& rng, const std::vector<std::string>& names, int depth)
{
    using namespace jetvar;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    std::uniform_int_distribution<int> which(0, static_cast<int>(names.size()) - 1);
    std::uniform_int_distribution<int> small(-3, 3);
    switch (pick(rng)) {
    case 0: return Expr(small(rng));
    case 1: return Expr::symbol(names[which(rng)]);
    case 2: return random_expr(rng, names, depth - 1) + random_expr(rng, names, depth - 1);
    case 3: return random_expr(rng, names, depth - 1) * random_expr(rng, names, depth - 1);
    case 4: return pow(random_expr(rng, names, depth - 1), Number(2));
    case 5: return sin(random_expr(rng, names, depth - 1));
    case 6: return exp(Expr::rational(1, 2) * Expr::symbol(names[which(rng)]));
    default: {
        Expr a = random_expr(rng, names, depth - 1);
        return Expr(1) / (Expr(2) + a * a);
    }
    }
}

} // namespace testsupport
