#include "firth/dataset.hpp"
#include "firth/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace firth;

namespace {

ErrorCode code_of(const std::vector<RawRecord>& rows) {
    try {
        validate_dataset(rows);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Dataset, TwoRowSlopeDesignIsFullRank) {
    const Dataset ds = validate_dataset({{1, 1, {1.0}}, {0, 1, {-1.0}}});
    EXPECT_EQ(ds.n(), 2);
    EXPECT_EQ(ds.p(), 1);
    EXPECT_TRUE(ds.full_column_rank());
    EXPECT_NO_THROW(ds.require_full_rank());
}

TEST(Dataset, SuccessesAboveTrials) {
    EXPECT_EQ(code_of({{2, 1, {1.0}}}), ErrorCode::CountOutOfRange);
    EXPECT_EQ(code_of({{-1, 3, {1.0}}}), ErrorCode::CountOutOfRange);
    EXPECT_EQ(code_of({{0, 0, {1.0}}}), ErrorCode::CountOutOfRange);
}

TEST(Dataset, FractionalCounts) {
    EXPECT_EQ(code_of({{0.5, 1, {1.0}}}), ErrorCode::NonIntegerCount);
    EXPECT_EQ(code_of({{1, 2.25, {1.0}}}), ErrorCode::NonIntegerCount);
}

TEST(Dataset, ProportionalColumnsAreFlagged) {
    const Dataset ds = validate_dataset({{1, 2, {1.0, 2.0}}, {0, 2, {2.0, 4.0}}});
    EXPECT_FALSE(ds.full_column_rank());
    EXPECT_EQ(ds.rank(), 1);
    try {
        ds.require_full_rank();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    }
}

TEST(Dataset, RaggedRowsAndEmptyInput) {
    EXPECT_EQ(code_of({{1, 1, {1.0}}, {0, 1, {1.0, 2.0}}}), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of({}), ErrorCode::EmptyData);
}

TEST(Dataset, MoreColumnsThanRows) {
    EXPECT_EQ(code_of({{1, 1, {1.0, 2.0}}}), ErrorCode::DimensionMismatch);
}

TEST(Dataset, NonFiniteCovariate) {
    EXPECT_EQ(code_of({{1, 1, {std::numeric_limits<double>::quiet_NaN()}}}), ErrorCode::NonFiniteInput);
    EXPECT_EQ(code_of({{1, 1, {std::numeric_limits<double>::infinity()}}}), ErrorCode::NonFiniteInput);
}

TEST(Dataset, ScaledRowKeepsCounts) {
    const Dataset ds = validate_dataset({{1, 3, {1.0, 0.5}}, {2, 4, {1.0, -1.0}}});
    const Dataset scaled = ds.with_scaled_row(1, 3.0);
    EXPECT_DOUBLE_EQ(scaled.X()(1, 1), -3.0);
    EXPECT_DOUBLE_EQ(scaled.X()(0, 1), 0.5);
    EXPECT_EQ(scaled.y(), ds.y());
    EXPECT_EQ(scaled.m(), ds.m());
}

TEST(Dataset, ColumnRankOfIdentity) {
    EXPECT_EQ(column_rank(Eigen::MatrixXd::Identity(3, 3)), 3);
}
