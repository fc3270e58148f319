"""
SUSD 시뮬레이터
순차적 무오류 상태 판별(Alice→Bob→Charlie) 프로토콜의 해석 모델, 광학 배치 모델,
불완전성 Monte Carlo, 광자 계수 통계를 제공하는 패키지
"""

__version__ = "0.1.0"
