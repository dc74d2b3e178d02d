#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edw {

// Every failure the engine can report. Names follow the error vocabulary of
// the warehouse model so diagnostics read the same in code and in tests.
enum class ErrorKind {
    // temporal
    UnknownUnit,
    MixedUnits,
    InvalidInterval,
    InvalidInstant,
    // parsing
    SyntaxError,
    UnknownFunction,
    // source model
    UnknownInterface,
    InverseMismatch,
    TypeMismatch,
    DanglingReference,
    InverseViolation,
    DuplicateId,
    CompositionShared,
    // warehouse model
    UnknownClass,
    UnknownOid,
    UnknownEnvironment,
    InheritanceCycle,
    PropertyConflict,
    RelationClosure,
    EnvironmentOverlap,
    EmptyEnvironment,
    FilterOutsideEnvironment,
    ArchiveNotTemporal,
    UnknownFilterProperty,
    MissingRetentionBound,
    // resolution and algebra
    UnresolvedSourceProperty,
    TypeInferenceError,
    UnknownProperty,
    UnknownPath,
    AmbiguousProperty,
    NameCollision,
    NonNumericAggregate,
    TypeMismatchInPredicate,
    NotCommonProperty,
    EmptyOperands,
    InvalidSchema,
    // refresh engine
    DanglingRelationTarget,
    AmbiguousRelationTarget,
    DuplicateKey,
    NonMonotonicInstant,
    UnitMismatch,
    NotSpecificProperty,
    FrozenObject,
    NonEmptyStore,
    // persistence
    Io,
    CorruptStore,
    Locked,
};

std::string_view to_string(ErrorKind kind);

struct SourcePos {
    int line = 0;
    int column = 0;

    bool valid() const { return line > 0; }

    // Positions are provenance only; they never participate in structural equality.
    friend bool operator==(SourcePos const &, SourcePos const &) { return true; }
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const &message, SourcePos pos = {});

    ErrorKind kind() const { return kind_; }
    SourcePos const &pos() const { return pos_; }
    // Message without the kind/position prefix.
    std::string const &detail() const { return detail_; }

private:
    ErrorKind kind_;
    SourcePos pos_;
    std::string detail_;
};

// A single validation finding. Validation never throws; it returns these.
struct Diagnostic {
    ErrorKind kind;
    std::string message;
    SourcePos pos;
    std::string class_name;
    std::string property;

    std::string format(std::string_view file = {}) const;
};

// Thrown when a list of diagnostics is promoted to a hard failure.
class DiagnosticError : public Error {
public:
    explicit DiagnosticError(std::vector<Diagnostic> diagnostics);

    std::vector<Diagnostic> const &diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

} // namespace edw
