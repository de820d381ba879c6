#ifndef PHBURGERS_VERIFY_HPP
#define PHBURGERS_VERIFY_HPP

#include <string>
#include <vector>

namespace phb {

struct VerifyCheck
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/*!
 * \brief Fast self-check of the structural identities and oracles.
 *
 * Runs in well under a second; every check records the measured quantity
 * against its tolerance in \c detail.
 */
std::vector<VerifyCheck> run_verification(unsigned seed = 20240611u);

bool all_passed(const std::vector<VerifyCheck>& checks);

} // namespace phb

#endif
