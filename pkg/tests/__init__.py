"""Test package for the relay-coding project"""
