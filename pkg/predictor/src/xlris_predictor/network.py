"""Residual classification networks for the per-axis codeword indices.

Two depths are supported. The 18-layer variant stacks two-convolution basic
blocks with stage widths 64/128/256/256; the 50-layer variant stacks
1x1-3x3-1x1 bottleneck blocks (4x expansion) with widths 64/128/256/512.
Every convolution is followed by batch norm and ReLU, the stem is a 7x7
convolution plus max pooling, and the head is average pooling into a fully
connected layer whose softmax gives the per-index probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

STAGES_18 = ((64, 2), (128, 2), (256, 2), (256, 2))
STAGES_50 = ((64, 3), (128, 4), (256, 6), (512, 3))


@dataclass(frozen=True)
class NetworkSpec:
    depth: int
    head_dim: int

    def __post_init__(self):
        if self.depth not in (18, 50):
            raise ValueError("depth must be 18 or 50")
        if self.head_dim < 1:
            raise ValueError("head_dim must be positive")

    @property
    def stages(self):
        return STAGES_18 if self.depth == 18 else STAGES_50


class BasicBlock(nn.Module):
    expansion = 1

    def __init__(self, in_ch: int, width: int, stride: int = 1):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, width, 3, stride=stride, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(width)
        self.conv2 = nn.Conv2d(width, width, 3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(width)
        self.relu = nn.ReLU(inplace=True)
        self.shortcut = None
        if stride != 1 or in_ch != width:
            self.shortcut = nn.Sequential(
                nn.Conv2d(in_ch, width, 1, stride=stride, bias=False),
                nn.BatchNorm2d(width))

    def forward(self, x):
        identity = x if self.shortcut is None else self.shortcut(x)
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.relu(out + identity)


class BottleneckBlock(nn.Module):
    expansion = 4

    def __init__(self, in_ch: int, width: int, stride: int = 1):
        super().__init__()
        out_ch = width * self.expansion
        self.conv1 = nn.Conv2d(in_ch, width, 1, bias=False)
        self.bn1 = nn.BatchNorm2d(width)
        self.conv2 = nn.Conv2d(width, width, 3, stride=stride, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(width)
        self.conv3 = nn.Conv2d(width, out_ch, 1, bias=False)
        self.bn3 = nn.BatchNorm2d(out_ch)
        self.relu = nn.ReLU(inplace=True)
        self.shortcut = None
        if stride != 1 or in_ch != out_ch:
            self.shortcut = nn.Sequential(
                nn.Conv2d(in_ch, out_ch, 1, stride=stride, bias=False),
                nn.BatchNorm2d(out_ch))

    def forward(self, x):
        identity = x if self.shortcut is None else self.shortcut(x)
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.relu(self.bn2(self.conv2(out)))
        out = self.bn3(self.conv3(out))
        return self.relu(out + identity)


class AxisNetwork(nn.Module):
    """2-channel image in, per-index logits out; softmax happens downstream."""

    def __init__(self, spec: NetworkSpec):
        super().__init__()
        self.spec = spec
        block = BasicBlock if spec.depth == 18 else BottleneckBlock
        self.stem = nn.Sequential(
            nn.Conv2d(2, 64, 7, stride=2, padding=3, bias=False),
            nn.BatchNorm2d(64),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(3, stride=2, padding=1))
        layers = []
        in_ch = 64
        for i, (width, count) in enumerate(spec.stages):
            for j in range(count):
                stride = 2 if (i > 0 and j == 0) else 1
                layers.append(block(in_ch, width, stride))
                in_ch = width * block.expansion
        self.stages = nn.Sequential(*layers)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.head = nn.Linear(in_ch, spec.head_dim)

    def forward(self, x):
        out = self.stages(self.stem(x))
        return self.head(torch.flatten(self.pool(out), 1))


def build_network(spec: NetworkSpec) -> AxisNetwork:
    return AxisNetwork(spec)
