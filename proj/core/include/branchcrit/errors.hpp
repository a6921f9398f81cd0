#pragma once

#include <stdexcept>
#include <string>

namespace branchcrit {

// Base class for every error raised by the library. Errors marked "bug signal"
// in the docs indicate a violated mathematical identity, not bad user input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define BRANCHCRIT_ERROR(Name)                                                 \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

BRANCHCRIT_ERROR(AbsentEntry);
BRANCHCRIT_ERROR(ParseError);
BRANCHCRIT_ERROR(BadRectangle);
BRANCHCRIT_ERROR(ComparablePairInStripe);
BRANCHCRIT_ERROR(NotAntichain);
BRANCHCRIT_ERROR(ColumnOutOfRange);
BRANCHCRIT_ERROR(InvalidInstance);
BRANCHCRIT_ERROR(CriterionFails);
BRANCHCRIT_ERROR(NegativeExponent);
BRANCHCRIT_ERROR(BadIndices);
BRANCHCRIT_ERROR(NotDivisible);
BRANCHCRIT_ERROR(UnassignedVariable);
BRANCHCRIT_ERROR(NonIntegralResult);
BRANCHCRIT_ERROR(InvalidSpec);
BRANCHCRIT_ERROR(DenominatorSurvived);
BRANCHCRIT_ERROR(NotFull);
BRANCHCRIT_ERROR(DGreaterEqualP);
BRANCHCRIT_ERROR(NotDominant);
BRANCHCRIT_ERROR(MixedWeights);
BRANCHCRIT_ERROR(IdentityFailed);

#undef BRANCHCRIT_ERROR

}  // namespace branchcrit
