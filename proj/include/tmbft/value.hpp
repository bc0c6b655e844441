#pragma once

#include <string>

#include "tmbft/basics.hpp"

namespace tmbft {

// A consensus value: a block (by digest), the explicit nil vote, or the
// absence marker. Nil and Bottom are distinct; neither is ever valid.
class Value {
public:
    enum class Kind : uint8_t { Bottom, Nil, Block };

    constexpr Value() = default;
    static Value bottom() { return Value(); }
    static Value nil() { return Value(Kind::Nil, 0); }
    static Value block(Digest d) { return Value(Kind::Block, d); }

    Kind kind() const { return kind_; }
    bool isBottom() const { return kind_ == Kind::Bottom; }
    bool isNil() const { return kind_ == Kind::Nil; }
    bool isBlock() const { return kind_ == Kind::Block; }
    Digest digest() const { return digest_; }

    friend bool operator==(const Value& a, const Value& b) {
        return a.kind_ == b.kind_ && a.digest_ == b.digest_;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
    friend bool operator<(const Value& a, const Value& b) {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
        return a.digest_ < b.digest_;
    }

    std::string str() const {
        switch (kind_) {
            case Kind::Bottom: return "_";
            case Kind::Nil: return "nil";
            case Kind::Block: return hexDigest(digest_);
        }
        return "?";
    }

private:
    constexpr Value(Kind k, Digest d) : kind_(k), digest_(d) {}
    Kind kind_ = Kind::Bottom;
    Digest digest_ = 0;
};

}  // namespace tmbft
