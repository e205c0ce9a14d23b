#pragma once

#include <stdexcept>
#include <string>

namespace nftledger {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or structurally malformed input (bad header, bad JSON, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A caller violated an operation contract (missing flags, unknown token, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Asked for a statistic of a token that has no transactions.
class NoSalesError : public ContractError {
public:
    NoSalesError() : ContractError("no sales") {}
    explicit NoSalesError(const std::string& what) : ContractError(what) {}
};

/// Input is too small or too flat for the requested statistic.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Circuit enumeration exceeded its configured circuit-count cap.
class BudgetExceededError : public Error {
public:
    BudgetExceededError() : Error("circuit budget exceeded") {}
};

}  // namespace nftledger
