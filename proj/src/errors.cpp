#include "pdcs/errors.hpp"

#include <sstream>

namespace pdcs {

namespace {
std::string singular_message(double omega, double rcond)
{
    std::ostringstream os;
    os << "singular resolvent at omega = " << omega << " (rcond = " << rcond
       << "); the linearization is unstable or marginal here";
    return os.str();
}
} // namespace

SingularSystemError::SingularSystemError(double omega, double rcond)
    : NumericalError(singular_message(omega, rcond)), omega_(omega), rcond_(rcond)
{
}

void require(bool condition, const std::string &message)
{
    if (!condition)
        throw ValidationError(message);
}

} // namespace pdcs
