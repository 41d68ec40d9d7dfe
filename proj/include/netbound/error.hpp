#pragma once

#include <stdexcept>
#include <string>

namespace netbound {

struct Error : std::runtime_error {
    enum class Kind {
        NonSquare,
        Singular,
        IndexOutOfRange,
        UnknownNode,
        ParseError,
        SchemaError,
        TooLarge,
        InvalidCut,
        InvalidChain,
        WrongField,
        NotDiagonalizable,
        ZeroGainOnSupport,
        IndexOutOfBox,
        InvalidInput,
        SingularPattern,
        DirectionCollision,
    };

    Kind kind;

    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline Error too_large(const std::string& msg) { return Error(Error::Kind::TooLarge, msg); }

}  // namespace netbound
