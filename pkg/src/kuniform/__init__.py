# development stub; restored before release
