"""
유틸리티 모듈 - 로깅, 오류 처리, 환경 변수, 난수 스트림 등 공통 기능을 제공합니다.
"""
